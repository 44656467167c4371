#pragma once

// JSON (de)serialization. nlohmann::json with std::map-backed objects keeps
// keys sorted, which gives byte-identical output across runs.

#include "drcalc/graph.hpp"
#include "drcalc/multipoly.hpp"

#include <json.hpp>

namespace drcalc {

constexpr int kSchemaVersion = 1;

inline nlohmann::json poly_to_json(const MultiPoly& p) {
    nlohmann::json terms = nlohmann::json::array();
    std::set<std::string> vars;
    for (const auto& [m, c] : p.terms) {
        nlohmann::json exp = nlohmann::json::object();
        for (const auto& [v, e] : m) {
            exp[v] = e;
            vars.insert(v);
        }
        terms.push_back({{"coeff", rat_to_string(c)}, {"exp", exp}});
    }
    return {{"vars", vars}, {"terms", terms}};
}

inline MultiPoly poly_from_json(const nlohmann::json& j) {
    MultiPoly p;
    for (const auto& t : j.at("terms")) {
        Monomial m;
        for (const auto& [v, e] : t.at("exp").items()) m[v] = e.get<int>();
        p.add_term(m, rat_from_string(t.at("coeff").get<std::string>()));
    }
    return p;
}

inline nlohmann::json graph_to_json(const StableGraph& G) {
    nlohmann::json vs = nlohmann::json::array();
    for (const auto& v : G.vertices) vs.push_back({{"genus", v.genus}, {"legs", v.legs}});
    nlohmann::json es = nlohmann::json::array();
    for (const auto& e : G.edges) es.push_back({{"tail", e.tail}, {"head", e.head}});
    return {{"vertices", vs}, {"edges", es}, {"semistable", G.semistable}};
}

inline StableGraph graph_from_json(const nlohmann::json& j) {
    StableGraph G;
    for (const auto& v : j.at("vertices")) {
        StableGraph::Vertex vx;
        vx.genus = v.at("genus").get<int>();
        for (const auto& l : v.value("legs", nlohmann::json::array())) vx.legs.push_back(l.get<int>());
        std::sort(vx.legs.begin(), vx.legs.end());
        G.vertices.push_back(vx);
    }
    for (const auto& e : j.at("edges")) G.edges.push_back({e.at("tail").get<int>(), e.at("head").get<int>()});
    G.semistable = j.value("semistable", false);
    G.validate();
    return G;
}

} // namespace drcalc
