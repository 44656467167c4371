// drcalc: command-line front end for the DR graph-invariant library.
//
// Subcommands: graphs, invariant, table, coeff, push, verify, bench, cache.
// All numeric output is exact rationals in "p/q" form; JSON objects are
// serialized with sorted keys, so output is byte-identical across runs.
// Exit codes: 0 success, 1 a check or method-agreement failure, 2 malformed
// input or usage error.

#include "drcalc/cache.hpp"
#include "drcalc/checks.hpp"
#include "drcalc/drtable.hpp"
#include "drcalc/io.hpp"
#include "drcalc/parallel.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace drcalc;
using nlohmann::json;

namespace {

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    return json::parse(in);
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::invalid_argument("cannot write " + out_path);
        out << j.dump(2) << "\n";
    }
}

// "b^2 a2" or "b^2*a2" -> monomial; "1" means the constant term.
Monomial parse_monomial(std::string s) {
    for (char& c : s)
        if (c == '*') c = ' ';
    Monomial m;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) {
        if (tok == "1") continue;
        auto caret = tok.find('^');
        std::string var = tok.substr(0, caret);
        int exp = 1;
        if (caret != std::string::npos) exp = std::stoi(tok.substr(caret + 1));
        if (var.empty() || exp < 0) throw std::invalid_argument("bad monomial token: " + tok);
        m[var] += exp;
    }
    return m;
}

json divisor_to_json(const DivisorMonomial& d) {
    json legs = json::object();
    for (const auto& [i, p] : d.leg_psi) legs[std::to_string(i)] = p;
    return {{"kappa1", d.kappa1}, {"leg_psi", legs}};
}

json stratum_to_json(const DecoratedStratum& s) {
    return {{"graph", graph_to_json(s.graph)},
            {"edge_psi", s.edge_psi},
            {"divisor", divisor_to_json(s.divisor)}};
}

DecoratedStratum stratum_from_json(const json& j) {
    DecoratedStratum s;
    s.graph = graph_from_json(j.at("graph"));
    s.edge_psi = j.at("edge_psi").get<std::vector<int>>();
    s.divisor.kappa1 = j.at("divisor").at("kappa1").get<int>();
    for (const auto& [k, v] : j.at("divisor").at("leg_psi").items())
        s.divisor.leg_psi[std::stoi(k)] = v.get<int>();
    return s;
}

json table_to_json(const DRTable& t) {
    json entries = json::array();
    for (const auto& [key, ent] : t.entries)
        entries.push_back({{"key", key},
                           {"stratum", stratum_to_json(ent.first)},
                           {"poly", poly_to_json(ent.second)},
                           {"poly_text", ent.second.to_string()}});
    return {{"schema", kSchemaVersion},
            {"kind", "dr-table"},
            {"g", t.g},
            {"n", t.n},
            {"c_max", t.c_max},
            {"flavor", t.flavor == TableFlavor::Full ? "full" : "top"},
            {"entries", entries}};
}

DRTable table_from_json(const json& j) {
    if (j.value("kind", "") != "dr-table") throw std::invalid_argument("not a dr-table file");
    DRTable t;
    t.g = j.at("g").get<int>();
    t.n = j.at("n").get<int>();
    t.c_max = j.at("c_max").get<int>();
    t.flavor = j.at("flavor").get<std::string>() == "top" ? TableFlavor::Top : TableFlavor::Full;
    for (const auto& e : j.at("entries"))
        t.add(stratum_from_json(e.at("stratum")), poly_from_json(e.at("poly")));
    return t;
}

json refined_to_json(const RefinedTable& t) {
    json entries = json::array();
    for (const auto& [key, ent] : t.entries) {
        const RefinedStratum& s = ent.first;
        json half = json::array();
        for (const auto& h : s.half_psi) half.push_back({h[0], h[1]});
        json legs = json::object();
        for (const auto& [i, p] : s.leg_psi) legs[std::to_string(i)] = p;
        entries.push_back({{"key", key},
                           {"stratum",
                            {{"graph", graph_to_json(s.graph)},
                             {"half_psi", half},
                             {"leg_psi", legs},
                             {"kappa1", s.kappa1}}},
                           {"poly", poly_to_json(ent.second)},
                           {"poly_text", ent.second.to_string()}});
    }
    return {{"schema", kSchemaVersion},
            {"kind", "refined-table"},
            {"g", t.g},
            {"n", t.n},
            {"entries", entries}};
}

json report_to_json(const CheckReport& r) {
    return {{"name", r.name},
            {"subject", r.subject},
            {"pass", r.pass},
            {"witness", r.witness},
            {"detail", r.detail}};
}

struct GlobalOpts {
    std::string cache_dir;
    int jobs = 0;
    bool strict = false; // recompute everything, ignoring cached results

    EvalConfig eval() const {
        EvalConfig cfg;
        cfg.cache_dir = cache_dir;
        cfg.jobs = jobs;
        if (strict) cfg.use_cache = false;
        return cfg;
    }
};

int run(int argc, char** argv) {
    CLI::App app{"Exact DR graph invariants, coefficient tables, and theorem checks"};
    app.require_subcommand(1);

    GlobalOpts opts;
    app.add_option("--cache-dir", opts.cache_dir, "result cache directory (default: $DRCALC_CACHE_DIR or ./.drcalc-cache)");
    app.add_option("--jobs", opts.jobs, "parallel jobs (default: $DRCALC_JOBS or hardware)");
    app.add_flag("--strict", opts.strict, "recompute everything; ignore cached results");

    // ---- graphs -----------------------------------------------------------
    auto* graphs = app.add_subcommand("graphs", "enumerate stable graphs");
    auto* gen = graphs->add_subcommand("gen", "generate all stable graphs of type (g, n)");
    int gg = 0, gn = 0, gmax_edges = 3;
    std::string gout;
    gen->add_option("--g", gg, "genus")->required();
    gen->add_option("--n", gn, "number of markings")->required();
    gen->add_option("--max-edges", gmax_edges, "edge bound (default 3)");
    gen->add_option("--out", gout, "output JSON path (default: stdout)");
    graphs->require_subcommand(1);

    // ---- invariant --------------------------------------------------------
    auto* inv = app.add_subcommand("invariant", "compute C(G) for a graph");
    std::string inv_graph, inv_method = "laurent", inv_out;
    inv->add_option("--graph", inv_graph, "graph JSON file")->required();
    inv->add_option("--method", inv_method, "oracle | laurent | division | both | all (both = laurent+division)");
    inv->add_option("--out", inv_out, "output JSON path (default: stdout)");

    // ---- table ------------------------------------------------------------
    auto* tab = app.add_subcommand("table", "assemble the DR coefficient table over decorated strata");
    int tg = 0, tn = 0, tc = 0;
    std::string tflavor = "full", tmethod = "laurent", tout;
    tab->add_option("--g", tg, "genus")->required();
    tab->add_option("--n", tn, "number of markings")->required();
    tab->add_option("--codim", tc, "maximum codimension")->required();
    tab->add_option("--flavor", tflavor, "full | top");
    tab->add_option("--method", tmethod, "laurent | division");
    tab->add_option("--out", tout, "output JSON path (default: stdout)");

    // ---- coeff ------------------------------------------------------------
    auto* cf = app.add_subcommand("coeff", "extract per-stratum coefficients of a charge monomial from a table");
    std::string cf_table, cf_mono, cf_out;
    int cf_codim = -1;
    cf->add_option("--table", cf_table, "table JSON file")->required();
    cf->add_option("--monomial", cf_mono, "monomial in the charges, e.g. \"b^2\"")->required();
    cf->add_option("--codim", cf_codim, "restrict to one codimension (default: all)");
    cf->add_option("--out", cf_out, "output JSON path (default: stdout)");

    // ---- push -------------------------------------------------------------
    auto* push = app.add_subcommand("push", "pushforward of the table along forgetting the last marking");
    int pg = 0, pn = 0, pc = 0;
    std::string pout, pmethod = "laurent";
    push->add_option("--g", pg, "genus")->required();
    push->add_option("--n", pn, "markings, including the one to forget (n >= 1)")->required();
    push->add_option("--codim", pc, "maximum codimension")->required();
    push->add_option("--method", pmethod, "laurent | division");
    push->add_option("--out", pout, "output JSON path (default: stdout)");

    // ---- verify -----------------------------------------------------------
    auto* ver = app.add_subcommand("verify", "run theorem checks");
    std::string vsuite = "all", vreport;
    int vg = -1, vn = -1, vc = -1, vorder = 20;
    ver->add_option("--suite", vsuite, "all | scalar | topdeg | aux | codimdeg | push");
    ver->add_option("--g", vg, "genus (suite-dependent default)");
    ver->add_option("--n", vn, "markings (suite-dependent default)");
    ver->add_option("--codim", vc, "codimension bound (suite-dependent default)");
    ver->add_option("--order", vorder, "series order for the scalar suite (default 20)");
    ver->add_option("--report", vreport, "write a JSON report here");

    // ---- bench ------------------------------------------------------------
    auto* ben = app.add_subcommand("bench", "time oracle vs zagier-laurent vs zagier-division (CSV)");
    std::string bout;
    ben->add_option("--out", bout, "CSV path (default: stdout)");

    // ---- cache ------------------------------------------------------------
    auto* cache = app.add_subcommand("cache", "result cache administration");
    auto* cstats = cache->add_subcommand("stats", "entry count and total bytes");
    auto* cclear = cache->add_subcommand("clear", "remove all cached entries");
    cache->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    EvalConfig cfg = opts.eval();

    if (gen->parsed()) {
        auto gs = enumerate_stable_graphs(gg, gn, gmax_edges);
        json arr = json::array();
        for (const auto& G : gs) arr.push_back(graph_to_json(G));
        json out = {{"schema", kSchemaVersion}, {"kind", "graph-list"},
                    {"g", gg},   {"n", gn},     {"max_edges", gmax_edges},
                    {"count", gs.size()},       {"graphs", arr}};
        emit(out, gout);
        if (!gout.empty()) std::cout << gs.size() << " graphs\n";
        return 0;
    }

    if (inv->parsed()) {
        StableGraph G = graph_from_json(load_json(inv_graph));
        std::vector<GraphInvariant> results;
        if (inv_method == "oracle" || inv_method == "all") results.push_back(cg_oracle(G, cfg));
        if (inv_method == "laurent" || inv_method == "both" || inv_method == "all")
            results.push_back(cg_zagier(G, ZagierStrategy::Laurent, cfg));
        if (inv_method == "division" || inv_method == "both" || inv_method == "all")
            results.push_back(cg_zagier(G, ZagierStrategy::Division, cfg));
        if (results.empty()) throw std::invalid_argument("unknown method: " + inv_method);

        bool agree = true;
        for (const auto& r : results) agree = agree && (r.value == results.front().value);
        json runs = json::array();
        for (const auto& r : results)
            runs.push_back({{"method", r.method},
                            {"poly", poly_to_json(r.value)},
                            {"poly_text", r.value.to_string()},
                            {"provenance", r.provenance}});
        json out = {{"schema", kSchemaVersion}, {"kind", "invariant"},
                    {"graph", graph_to_json(G)}, {"methods_agree", agree}, {"runs", runs}};
        emit(out, inv_out);
        if (!inv_out.empty() || results.size() > 1)
            std::cout << results.front().value.to_string()
                      << (results.size() > 1 ? (agree ? "  (methods agree)" : "  (METHODS DISAGREE)") : "")
                      << "\n";
        return agree ? 0 : 1;
    }

    if (tab->parsed()) {
        TableFlavor fl = tflavor == "top" ? TableFlavor::Top
                         : tflavor == "full" ? TableFlavor::Full
                         : throw std::invalid_argument("unknown flavor: " + tflavor);
        ZagierStrategy st = tmethod == "division" ? ZagierStrategy::Division
                            : tmethod == "laurent" ? ZagierStrategy::Laurent
                            : throw std::invalid_argument("unknown method: " + tmethod);
        DRTable t = assemble_dr(tg, tn, tc, fl, st, cfg);
        emit(table_to_json(t), tout);
        if (!tout.empty()) std::cout << t.entries.size() << " strata\n";
        return 0;
    }

    if (cf->parsed()) {
        DRTable t = table_from_json(load_json(cf_table));
        Monomial m = parse_monomial(cf_mono);
        std::vector<int> codims;
        if (cf_codim >= 0) codims.push_back(cf_codim);
        else for (int c = 0; c <= t.c_max; ++c) codims.push_back(c);
        json by_codim = json::array();
        for (int c : codims) {
            json entries = json::array();
            for (const auto& [key, ent] : extract_coefficient(t, m, c))
                entries.push_back({{"key", key},
                                   {"stratum", stratum_to_json(ent.first)},
                                   {"coeff", rat_to_string(ent.second)}});
            by_codim.push_back({{"codim", c}, {"entries", entries}});
        }
        emit({{"schema", kSchemaVersion}, {"kind", "coefficients"},
              {"monomial", cf_mono},      {"by_codim", by_codim}},
             cf_out);
        return 0;
    }

    if (push->parsed()) {
        ZagierStrategy st = pmethod == "division" ? ZagierStrategy::Division : ZagierStrategy::Laurent;
        DRTable t = assemble_dr(pg, pn, pc, TableFlavor::Full, st, cfg);
        RefinedTable pushed = forget_pushforward(t);
        emit(refined_to_json(pushed), pout);
        if (!pout.empty()) std::cout << pushed.entries.size() << " strata\n";
        return 0;
    }

    if (ver->parsed()) {
        bool all = vsuite == "all";
        std::vector<std::function<std::vector<CheckReport>()>> tasks;
        auto one = [](CheckReport r) { return std::vector<CheckReport>{std::move(r)}; };

        if (all || vsuite == "scalar") {
            int order = vorder;
            tasks.push_back([order] { return check_scalar_identities(order); });
            tasks.push_back([order, one] { return one(check_qbar(std::min(order, 8))); });
        }
        if (all || vsuite == "topdeg") {
            // Per-graph correspondence on the corpus of the requested type,
            // then the assembled-table identity.
            int g = vg >= 0 ? vg : 1, n = vn >= 0 ? vn : 1, c = vc >= 0 ? vc : 2;
            for (const auto& G : enumerate_stable_graphs(g, n, 3)) {
                tasks.push_back([G, cfg, one] { return one(check_topdeg_per_graph(G, ZagierStrategy::Laurent, cfg)); });
                tasks.push_back([G, cfg, one] { return one(check_corollary_inversion(G, ZagierStrategy::Laurent, cfg)); });
            }
            tasks.push_back([g, n, c, cfg, one] { return one(check_topdeg_global(g, n, c, cfg)); });
        }
        if (all || vsuite == "aux") {
            int g = vg >= 0 ? vg : 1, n = vn >= 0 ? vn : 1;
            for (const auto& G : enumerate_stable_graphs(g, n, 3))
                tasks.push_back([G, cfg, one] { return one(check_aux_lemma(G, ZagierStrategy::Laurent, cfg)); });
        }
        if (all || vsuite == "codimdeg") {
            int g = vg >= 0 ? vg : 1, n = vn >= 0 ? vn : 1, c = vc >= 0 ? vc : 2;
            tasks.push_back([g, n, c, cfg, one] { return one(check_codim_minus_deg(g, n, c, cfg)); });
        }
        if (all || vsuite == "push") {
            int g = vg >= 0 ? vg : 1, n = vn >= 0 ? vn : 1, c = vc >= 0 ? vc : 1;
            tasks.push_back([g, n, c, cfg, one] { return one(check_dr_push(g, n, c, cfg)); });
        }
        if (tasks.empty()) throw std::invalid_argument("unknown suite: " + vsuite);

        std::vector<std::vector<CheckReport>> slots(tasks.size());
        parallel_for((long)tasks.size(), cfg.jobs, [&](long i) { slots[i] = tasks[i](); });

        std::vector<CheckReport> reports;
        for (auto& s : slots) reports.insert(reports.end(), s.begin(), s.end());
        std::sort(reports.begin(), reports.end(), [](const CheckReport& a, const CheckReport& b) {
            return std::tie(a.name, a.subject) < std::tie(b.name, b.subject);
        });

        bool pass = true;
        json jreports = json::array();
        for (const auto& r : reports) {
            pass = pass && r.pass;
            jreports.push_back(report_to_json(r));
            std::cout << r.to_string() << "\n";
        }
        if (!vreport.empty())
            emit({{"schema", kSchemaVersion}, {"kind", "verify-report"},
                  {"suite", vsuite},          {"pass", pass},
                  {"checks", jreports}},
                 vreport);
        std::cout << (pass ? "PASS" : "FAIL") << " (" << reports.size() << " checks)\n";
        return pass ? 0 : 1;
    }

    if (ben->parsed()) {
        EvalConfig bcfg = cfg;
        bcfg.use_cache = false;
        struct Case { std::string name; StableGraph G; };
        std::vector<Case> cases;
        cases.push_back({"loop", {{{1, {1}}}, {{0, 0}}}});
        cases.push_back({"2-banana", {{{1, {}}, {0, {1}}}, {{0, 1}, {0, 1}}}});
        cases.push_back({"loop-with-tail", {{{1, {}}, {1, {1}}}, {{0, 0}, {0, 1}}}});
        cases.push_back({"3-banana", {{{0, {1}}, {0, {2}}}, {{0, 1}, {0, 1}, {0, 1}}}});
        std::ostringstream csv;
        csv << "graph,method,time_ms,terms\n";
        auto time_one = [&](const std::string& name, const std::string& method,
                            const std::function<GraphInvariant()>& f) {
            auto t0 = std::chrono::steady_clock::now();
            GraphInvariant r = f();
            auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            csv << name << "," << method << "," << ms << "," << r.value.terms.size() << "\n";
        };
        for (const auto& c : cases) {
            time_one(c.name, "oracle", [&] { return cg_oracle(c.G, bcfg); });
            time_one(c.name, "zagier-laurent", [&] { return cg_zagier(c.G, ZagierStrategy::Laurent, bcfg); });
            time_one(c.name, "zagier-division", [&] { return cg_zagier(c.G, ZagierStrategy::Division, bcfg); });
        }
        if (bout.empty()) {
            std::cout << csv.str();
        } else {
            std::ofstream out(bout);
            out << csv.str();
            std::cout << "wrote " << bout << "\n";
        }
        return 0;
    }

    if (cstats->parsed() || cclear->parsed()) {
        std::string dir = resolve_cache_dir(opts.cache_dir);
        if (cclear->parsed()) {
            std::cout << "removed " << cache_clear(dir) << " entries from " << dir << "\n";
        } else {
            auto [files, bytes] = cache_stats(dir);
            std::cout << dir << ": " << files << " entries, " << bytes << " bytes\n";
        }
        return 0;
    }

    return 2; // unreachable with require_subcommand
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
