#include "drcalc/drtable.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

namespace drcalc {

std::string DivisorMonomial::key() const {
    std::ostringstream os;
    os << "k" << kappa1;
    for (const auto& [i, p] : leg_psi)
        if (p != 0) os << ",p" << i << ":" << p;
    return os.str();
}

std::string DecoratedStratum::key() const {
    return canonical_form(graph, edge_psi) + "|" + divisor.key();
}

void DRTable::add(const DecoratedStratum& s, const MultiPoly& value) {
    if (value.is_zero()) return;
    std::string k = s.key();
    auto it = entries.find(k);
    if (it == entries.end()) {
        entries.emplace(k, std::make_pair(s, value));
    } else {
        it->second.second += value;
        if (it->second.second.is_zero()) entries.erase(it);
    }
}

Relation ambient_relation(int g, int n) {
    Relation rel;
    if (n == 0) {
        if (2 * g - 2 == 0)
            throw std::invalid_argument("ambient_relation: no relation for (g, n) = (1, 0)");
        rel.form = Rational(2 * g - 2) * MultiPoly::var("b");
        rel.eliminated = "b";
        return rel;
    }
    MultiPoly f;
    for (int i = 1; i <= n; ++i) f += MultiPoly::var("a" + std::to_string(i));
    f -= Rational(2 * g - 2 + n) * MultiPoly::var("b");
    rel.form = f;
    rel.eliminated = "a1";
    return rel;
}

SpecializationData table_charges(int g, int n) {
    SpecializationData spec = SpecializationData::symbolic(n);
    spec.ambient = ambient_relation(g, n);
    return spec;
}

namespace {

// All vectors d >= 0 (componentwise) with sum(d) <= budget.
void enumerate_bounded(int len, int budget, std::vector<int>& cur,
                       const std::function<void(const std::vector<int>&)>& emit) {
    if ((int)cur.size() == len) {
        emit(cur);
        return;
    }
    for (int v = 0; v <= budget; ++v) {
        cur.push_back(v);
        enumerate_bounded(len, budget - v, cur, emit);
        cur.pop_back();
    }
}

} // namespace

DRTable assemble_dr_with_charges(int g, int n, int c_max, TableFlavor flavor,
                                 const SpecializationData& spec, ZagierStrategy strategy,
                                 const EvalConfig& cfg) {
    if (g < 0 || n < 0 || c_max < 0 || g > 3 || n > 6 || c_max > 4)
        throw std::invalid_argument("assemble_dr: beyond desk-scale bounds");
    if ((int)spec.leg_charges.size() < n)
        throw std::invalid_argument("assemble_dr: fewer leg charges than markings");

    DRTable table;
    table.g = g;
    table.n = n;
    table.c_max = c_max;
    table.flavor = flavor;

    auto normalized = [&](MultiPoly p) {
        return spec.ambient ? poly_normalize(p, *spec.ambient) : p;
    };

    // Divisor expansion coefficients of exp(-(b^2/2) kappa_1 + sum (a_i^2/2) psi_i).
    MultiPoly kappa_base = normalized(Rational(-1, 2) * spec.b * spec.b);
    std::vector<MultiPoly> psi_base;
    for (int i = 0; i < n; ++i)
        psi_base.push_back(normalized(Rational(1, 2) * spec.leg_charges[i] * spec.leg_charges[i]));

    for (const StableGraph& G : enumerate_stable_graphs(g, n, c_max)) {
        int E = G.num_edges();
        if (E > c_max) continue;
        Rational aut = automorphism_order(G);
        std::vector<int> cur;
        enumerate_bounded(E, c_max - E, cur, [&](const std::vector<int>& d) {
            int used = E;
            for (int x : d) used += x;
            MultiPoly base = (flavor == TableFlavor::Top)
                                 ? dr_coeff_top(G, d, spec, strategy, cfg)
                                 : dr_coeff(G, d, spec, strategy, cfg);
            if (base.is_zero()) return;
            base = Rational(1) / aut * base;
            // divisor monomials within the remaining codimension budget
            std::vector<int> dv;
            enumerate_bounded(n + 1, c_max - used, dv, [&](const std::vector<int>& m) {
                DivisorMonomial div;
                div.kappa1 = m[0];
                MultiPoly coeff = kappa_base.pow(m[0]) / factorial(m[0]);
                for (int i = 0; i < n; ++i) {
                    if (m[i + 1] == 0) continue;
                    div.leg_psi[i + 1] = m[i + 1];
                    coeff *= psi_base[i].pow(m[i + 1]) / factorial(m[i + 1]);
                }
                DecoratedStratum s{G, d, div};
                table.add(s, coeff * base);
            });
        });
    }
    return table;
}

DRTable assemble_dr(int g, int n, int c_max, TableFlavor flavor, ZagierStrategy strategy,
                    const EvalConfig& cfg) {
    return assemble_dr_with_charges(g, n, c_max, flavor, table_charges(g, n), strategy, cfg);
}

std::map<std::string, std::pair<DecoratedStratum, Rational>>
extract_coefficient(const DRTable& table, const Monomial& monomial, int c) {
    if (monomial.count("a1"))
        throw std::invalid_argument("extract_coefficient: a1 is eliminated by the relation");
    if (c > table.c_max) throw std::invalid_argument("extract_coefficient: codim beyond table bound");
    std::map<std::string, std::pair<DecoratedStratum, Rational>> out;
    for (const auto& [key, ent] : table.entries) {
        if (ent.first.codim() != c) continue;
        auto it = ent.second.terms.find(monomial);
        Rational coeff = (it == ent.second.terms.end()) ? Rational(0) : it->second;
        out.emplace(key, std::make_pair(ent.first, coeff));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Refined basis

int RefinedStratum::codim() const {
    int c = graph.num_edges();
    for (const auto& h : half_psi) c += h[0] + h[1];
    for (const auto& [i, p] : leg_psi) c += p;
    for (int k : kappa1) c += k;
    return c;
}

std::string RefinedStratum::key() const {
    int V = graph.num_vertices();
    if (V > 8) throw std::invalid_argument("refined stratum key: vertex bound (8) exceeded");
    std::vector<int> idx(V);
    std::iota(idx.begin(), idx.end(), 0);
    std::string best;
    std::vector<int> perm(V);
    do {
        for (int pos = 0; pos < V; ++pos) perm[idx[pos]] = pos;
        std::ostringstream os;
        for (int pos = 0; pos < V; ++pos) {
            const auto& vx = graph.vertices[idx[pos]];
            os << "v" << vx.genus << "k" << kappa1[idx[pos]] << "[";
            for (int l : vx.legs) os << l << ",";
            os << "]";
        }
        // edge records with orientation normalized away
        std::vector<std::array<int, 4>> es;
        for (int e = 0; e < graph.num_edges(); ++e) {
            int u = perm[graph.edges[e].tail], v = perm[graph.edges[e].head];
            int x = half_psi[e][0], y = half_psi[e][1];
            if (u > v || (u == v && x > y)) {
                std::swap(u, v);
                std::swap(x, y);
            }
            es.push_back({u, v, x, y});
        }
        std::sort(es.begin(), es.end());
        for (const auto& r : es) os << "e" << r[0] << "-" << r[1] << ":" << r[2] << "," << r[3] << ";";
        for (const auto& [i, p] : leg_psi)
            if (p != 0) os << "L" << i << ":" << p << ";";
        std::string enc = os.str();
        if (best.empty() || enc < best) best = enc;
    } while (std::next_permutation(idx.begin(), idx.end()));
    return best;
}

void RefinedTable::add(const RefinedStratum& s, const MultiPoly& value) {
    if (value.is_zero()) return;
    std::string k = s.key();
    auto it = entries.find(k);
    if (it == entries.end()) {
        entries.emplace(k, std::make_pair(s, value));
    } else {
        it->second.second += value;
        if (it->second.second.is_zero()) entries.erase(it);
    }
}

void RefinedTable::add_scaled(const RefinedTable& o, const Rational& c) {
    if (c == 0) return;
    for (const auto& [k, ent] : o.entries) add(ent.first, c * ent.second);
}

RefinedTable refine(const DRTable& table) {
    RefinedTable out;
    out.g = table.g;
    out.n = table.n;
    for (const auto& [key, ent] : table.entries) {
        const DecoratedStratum& s = ent.first;
        const StableGraph& G = s.graph;
        int E = G.num_edges(), V = G.num_vertices();

        RefinedStratum base;
        base.graph = G;
        base.half_psi.assign(E, {0, 0});
        base.kappa1.assign(V, 0);
        for (const auto& [i, p] : s.divisor.leg_psi)
            if (p != 0) base.leg_psi[i] = p;

        std::vector<std::pair<RefinedStratum, Rational>> parts{{base, Rational(1)}};
        // (psi + psi')^{d_e} binomially per edge
        for (int e = 0; e < E; ++e) {
            int d = s.edge_psi[e];
            if (d == 0) continue;
            std::vector<std::pair<RefinedStratum, Rational>> next;
            for (const auto& [r, c] : parts)
                for (int p = 0; p <= d; ++p) {
                    RefinedStratum r2 = r;
                    r2.half_psi[e] = {p, d - p};
                    next.emplace_back(r2, c * binomial(d, p));
                }
            parts = std::move(next);
        }
        // ambient kappa_1^j = (sum_v kappa_1[v])^j; j ordered picks realize the
        // multinomial expansion exactly
        for (int rep = 0; rep < s.divisor.kappa1; ++rep) {
            std::vector<std::pair<RefinedStratum, Rational>> next;
            for (const auto& [r, c] : parts)
                for (int v = 0; v < V; ++v) {
                    RefinedStratum r2 = r;
                    r2.kappa1[v]++;
                    next.emplace_back(r2, c);
                }
            parts = std::move(next);
        }
        for (const auto& [r, c] : parts) out.add(r, c * ent.second);
    }
    return out;
}

RefinedTable map_values(const RefinedTable& t, const std::function<MultiPoly(const MultiPoly&)>& f) {
    RefinedTable out;
    out.g = t.g;
    out.n = t.n;
    for (const auto& [k, ent] : t.entries) out.add(ent.first, f(ent.second));
    return out;
}

RefinedTable glue_refined(const RefinedTable& t, int i, int j) {
    RefinedTable out;
    out.g = t.g + 1; // a new non-separating node raises h1 + genus bookkeeping
    out.n = t.n - 2;
    for (const auto& [k, ent] : t.entries) {
        const RefinedStratum& s = ent.first;
        RefinedStratum r;
        r.graph = glue_legs(s.graph, i, j);
        r.half_psi = s.half_psi;
        int pi = s.leg_psi.count(i) ? s.leg_psi.at(i) : 0;
        int pj = s.leg_psi.count(j) ? s.leg_psi.at(j) : 0;
        r.half_psi.push_back({pi, pj}); // glue_legs appends the edge, tail at i
        r.kappa1 = s.kappa1;
        // markings are compacted the same way glue_legs does
        std::vector<int> remaining;
        for (const auto& [m, p] : s.leg_psi)
            if (m != i && m != j) remaining.push_back(m);
        std::vector<int> labels;
        for (const auto& vx : s.graph.vertices)
            for (int l : vx.legs)
                if (l != i && l != j) labels.push_back(l);
        std::sort(labels.begin(), labels.end());
        std::map<int, int> relabel;
        for (int idx = 0; idx < (int)labels.size(); ++idx) relabel[labels[idx]] = idx + 1;
        for (int m : remaining) r.leg_psi[relabel.at(m)] = s.leg_psi.at(m);
        out.add(r, ent.second);
    }
    return out;
}

namespace {

// Delete vertex w (must have no legs/edges left referencing it besides the
// ones being removed) and the listed edges; decorations are remapped.
struct Surgery {
    StableGraph graph;
    std::vector<std::array<int, 2>> half_psi;
    std::vector<int> kappa1;

    void drop_edges(std::vector<int> es) {
        std::sort(es.rbegin(), es.rend());
        for (int e : es) {
            graph.edges.erase(graph.edges.begin() + e);
            half_psi.erase(half_psi.begin() + e);
        }
    }
    void drop_vertex(int w) {
        graph.vertices.erase(graph.vertices.begin() + w);
        kappa1.erase(kappa1.begin() + w);
        for (auto& e : graph.edges) {
            if (e.tail > w) e.tail--;
            if (e.head > w) e.head--;
        }
    }
};

} // namespace

RefinedTable forget_pushforward(const RefinedTable& t) {
    int last = t.n;
    RefinedTable out;
    out.g = t.g;
    out.n = t.n - 1;
    for (const auto& [key, ent] : t.entries) {
        const RefinedStratum& s = ent.first;
        const StableGraph& G = s.graph;
        int w = G.leg_vertex(last);
        if (w < 0) throw std::invalid_argument("forget_pushforward: missing last marking");
        int s_exp = s.leg_psi.count(last) ? s.leg_psi.at(last) : 0;
        int gw = G.vertices[w].genus;
        int m = G.valence(w) - 1; // points on the carrier after forgetting

        bool stable_after = 2 * gw - 2 + m > 0;
        if (stable_after) {
            StableGraph H = remove_leg(G, last);
            RefinedStratum base;
            base.graph = H;
            base.half_psi = s.half_psi;
            base.kappa1 = s.kappa1;
            base.leg_psi = s.leg_psi;
            base.leg_psi.erase(last);
            int jw = s.kappa1[w];
            // kappa_1 on the carrier differs from the pullback by psi_{n+1}
            for (int tt = 0; tt <= jw; ++tt) {
                Rational branch = binomial(jw, tt);
                int power = s_exp + tt; // total psi_{n+1} power in this branch
                RefinedStratum r = base;
                r.kappa1[w] = jw - tt;
                if (power == 0) {
                    // signless string equation: decrement one psi at the carrier
                    for (const auto& [mk, p] : r.leg_psi) {
                        if (G.leg_vertex(mk) != w || p == 0) continue;
                        RefinedStratum r2 = r;
                        if (p == 1) r2.leg_psi.erase(mk); else r2.leg_psi[mk] = p - 1;
                        out.add(r2, branch * ent.second);
                    }
                    for (int e = 0; e < H.num_edges(); ++e)
                        for (int side = 0; side < 2; ++side) {
                            int end = side == 0 ? H.edges[e].tail : H.edges[e].head;
                            if (end != w || r.half_psi[e][side] == 0) continue;
                            RefinedStratum r2 = r;
                            r2.half_psi[e][side]--;
                            out.add(r2, branch * ent.second);
                        }
                } else if (power == 1) {
                    out.add(r, branch * Rational(2 * gw - 2 + m) * ent.second);
                } else if (power == 2) {
                    RefinedStratum r2 = r;
                    r2.kappa1[w]++;
                    out.add(r2, branch * ent.second);
                } else {
                    throw std::invalid_argument(
                        "forget_pushforward: kappa class beyond kappa_1 required");
                }
            }
            continue;
        }

        // carrier becomes unstable: genus 0, three points including the leg
        if (gw != 0 || m != 2)
            throw std::invalid_argument("forget_pushforward: unexpected unstable carrier");
        if (s_exp > 0 || s.kappa1[w] > 0) continue; // psi/kappa on a popped bubble: zero
        std::vector<int> other_legs;
        for (int l : G.vertices[w].legs)
            if (l != last) other_legs.push_back(l);
        std::vector<std::pair<int, int>> slots; // (edge, side) at w
        for (int e = 0; e < G.num_edges(); ++e) {
            if (G.edges[e].tail == w) slots.emplace_back(e, 0);
            if (G.edges[e].head == w) slots.emplace_back(e, 1);
        }

        if (other_legs.size() == 1 && slots.size() == 1) {
            // bubble with one marking pops back onto the neighbor
            int i = other_legs[0];
            auto [e, side] = slots[0];
            if (s.half_psi[e][side] != 0) continue;       // psi on the bubble branch
            if (s.leg_psi.count(i) && s.leg_psi.at(i) != 0) continue; // psi_i on the bubble
            int far_side = 1 - side;
            int u = far_side == 0 ? G.edges[e].tail : G.edges[e].head;
            int far_exp = s.half_psi[e][far_side];
            Surgery sg{G, s.half_psi, s.kappa1};
            sg.graph.vertices[w].legs.clear();
            sg.drop_edges({e});
            int u2 = u > w ? u - 1 : u;
            sg.drop_vertex(w);
            sg.graph.vertices[u2].legs.push_back(i);
            std::sort(sg.graph.vertices[u2].legs.begin(), sg.graph.vertices[u2].legs.end());
            RefinedStratum r;
            r.graph = sg.graph;
            r.half_psi = sg.half_psi;
            r.kappa1 = sg.kappa1;
            r.leg_psi = s.leg_psi;
            r.leg_psi.erase(last);
            if (far_exp > 0) r.leg_psi[i] = far_exp;
            out.add(r, ent.second);
            continue;
        }
        if (other_legs.empty() && slots.size() == 2) {
            auto [e1, side1] = slots[0];
            auto [e2, side2] = slots[1];
            if (e1 == e2)
                throw std::invalid_argument("forget_pushforward: loop contraction unsupported");
            if (s.half_psi[e1][side1] != 0 || s.half_psi[e2][side2] != 0) continue;
            int far1 = 1 - side1, far2 = 1 - side2;
            int u = far1 == 0 ? G.edges[e1].tail : G.edges[e1].head;
            int v = far2 == 0 ? G.edges[e2].tail : G.edges[e2].head;
            int x = s.half_psi[e1][far1], y = s.half_psi[e2][far2];
            Surgery sg{G, s.half_psi, s.kappa1};
            sg.graph.vertices[w].legs.clear();
            sg.drop_edges({e1, e2});
            int u2 = u > w ? u - 1 : u;
            int v2 = v > w ? v - 1 : v;
            sg.drop_vertex(w);
            sg.graph.edges.push_back({u2, v2});
            sg.half_psi.push_back({x, y});
            RefinedStratum r;
            r.graph = sg.graph;
            r.half_psi = sg.half_psi;
            r.kappa1 = sg.kappa1;
            r.leg_psi = s.leg_psi;
            r.leg_psi.erase(last);
            out.add(r, ent.second);
            continue;
        }
        throw std::invalid_argument("forget_pushforward: carrier shape outside the model");
    }
    return out;
}

RefinedTable forget_pushforward(const DRTable& table,
                                const std::map<std::string, MultiPoly>& charge_values) {
    RefinedTable fine = refine(table);
    if (!charge_values.empty()) {
        fine = map_values(fine, [&](const MultiPoly& p) {
            MultiPoly q = p;
            for (const auto& [v, repl] : charge_values) q = q.substitute(v, repl);
            return q;
        });
    }
    return forget_pushforward(fine);
}

} // namespace drcalc
