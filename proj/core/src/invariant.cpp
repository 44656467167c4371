#include "drcalc/invariant.hpp"

#include "drcalc/cache.hpp"
#include "drcalc/io.hpp"
#include "drcalc/linalg.hpp"
#include "drcalc/parallel.hpp"
#include "drcalc/series.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <sstream>

namespace drcalc {

namespace {

std::string zvar(int e) { return "z" + std::to_string(e); }

Integer int128_to_integer(unsigned __int128 v) {
    Integer r = (std::uint64_t)(v >> 64);
    r <<= 64;
    r += (std::uint64_t)v;
    return r;
}

// ---------------------------------------------------------------------------
// Direct enumeration of mod-r weightings.
// ---------------------------------------------------------------------------

// A weighting assigns x_e in [0, r) to each oriented edge (tail half-edge
// value x_e, head half-edge value -x_e); the per-vertex condition is a mod-r
// flow-divergence demand. Solutions = one particular flow on a spanning tree
// + the coset of mod-r cycle flows.
struct WeightingEnumerator {
    long r;
    int E, h;
    std::vector<long> x0;                    // particular solution
    std::vector<std::vector<int>> rows;      // fundamental cycle rows, one per free edge
    bool empty = false;                      // demands unsatisfiable => zero weightings

    WeightingEnumerator(const StableGraph& G, const std::vector<long>& charges, long rr) : r(rr) {
        E = G.num_edges();
        h = h1(G);
        int V = G.num_vertices();
        x0.assign(E, 0);

        std::vector<int> tree;
        {
            UnionFindLite uf(V);
            for (int e = 0; e < E; ++e)
                if (G.edges[e].tail != G.edges[e].head && uf.unite(G.edges[e].tail, G.edges[e].head))
                    tree.push_back(e);
        }

        // demands: divergence(v) == -a_v (mod r)
        std::vector<long> demand(V);
        for (int v = 0; v < V; ++v) demand[v] = ((-charges[v]) % r + r) % r;

        // peel tree leaves
        std::vector<std::vector<int>> incident(V);
        for (int e : tree) {
            incident[G.edges[e].tail].push_back(e);
            incident[G.edges[e].head].push_back(e);
        }
        std::vector<int> deg(V);
        for (int v = 0; v < V; ++v) deg[v] = (int)incident[v].size();
        std::vector<char> edge_done(E, 0), removed(V, 0);
        std::vector<int> stack;
        for (int v = 0; v < V; ++v)
            if (deg[v] == 1) stack.push_back(v);
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            if (removed[v] || deg[v] != 1) continue;
            int e = -1;
            for (int f : incident[v])
                if (!edge_done[f]) { e = f; break; }
            int u = (G.edges[e].tail == v) ? G.edges[e].head : G.edges[e].tail;
            if (G.edges[e].tail == v) {
                x0[e] = demand[v];
                demand[u] = (demand[u] + x0[e]) % r;
            } else {
                x0[e] = (r - demand[v]) % r;
                demand[u] = ((demand[u] - x0[e]) % r + r) % r;
            }
            edge_done[e] = 1;
            removed[v] = 1;
            if (--deg[u] == 1) stack.push_back(u);
        }
        for (int v = 0; v < V; ++v)
            if (!removed[v] && demand[v] % r != 0) empty = true;

        CycleData cd = cycle_data(G, tree);
        for (const auto& [e, form] : cd.cycle_form) {
            std::vector<int> row(E, 0);
            for (const auto& [f, s] : form) row[f] = s;
            rows.push_back(row);
        }
    }

    struct UnionFindLite {
        std::vector<int> parent;
        explicit UnionFindLite(int n) : parent(n) {
            for (int i = 0; i < n; ++i) parent[i] = i;
        }
        int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
        bool unite(int a, int b) {
            a = find(a); b = find(b);
            if (a == b) return false;
            parent[a] = b;
            return true;
        }
    };

    // sum over the coset of prod_e x_e (r - x_e)
    Integer accumulate() const {
        if (empty) return 0;
        // enough headroom in 128 bits? prod <= (r^2/4)^E over r^h terms.
        double bits = 2.0 * E * std::log2((double)r) + h * std::log2((double)r);
        bool wide = bits > 120.0;

        Integer total = 0;
        unsigned __int128 acc128 = 0;
        std::vector<long> cur = x0;
        std::function<void(int)> rec = [&](int level) {
            if (level == h) {
                unsigned __int128 prod = 1;
                for (int e = 0; e < E; ++e) {
                    long w = cur[e];
                    if (w == 0) return;
                    prod *= (unsigned __int128)w * (unsigned long long)(r - w);
                }
                if (wide)
                    total += int128_to_integer(prod);
                else
                    acc128 += prod;
                return;
            }
            const auto& row = rows[level];
            for (long c = 0; c < r; ++c) {
                rec(level + 1);
                for (int e = 0; e < E; ++e)
                    if (row[e]) cur[e] = ((cur[e] + row[e]) % r + r) % r;
            }
            // after r increments each entry has wrapped back; nothing to undo
        };
        rec(0);
        if (!wide) total = int128_to_integer(acc128);
        return total;
    }
};

// ---------------------------------------------------------------------------
// Per-tree data for the spanning-tree formula.
// ---------------------------------------------------------------------------

struct TreeFactors {
    std::map<int, MultiPoly> charge_form; // tree edge -> a_{e,T} (sum of charges past head)
    std::map<int, MultiPoly> cycle_form;  // free edge -> z_{e,T} (signed z linear form)
};

TreeFactors tree_factors(const StableGraph& G, const std::vector<int>& tree) {
    TreeFactors tf;
    CycleData cd = cycle_data(G, tree);
    for (const auto& [e, comp] : cd.head_component) {
        MultiPoly a;
        for (int v : comp) a += MultiPoly::var(charge_var(v));
        tf.charge_form[e] = a;
    }
    for (const auto& [e, form] : cd.cycle_form) {
        MultiPoly z;
        for (const auto& [f, s] : form) z += Rational(s) * MultiPoly::var(zvar(f));
        tf.cycle_form[e] = z;
    }
    return tf;
}

// ---------------------------------------------------------------------------
// Laurent strategy: fold per-tree factors with target-directed pruning.
// ---------------------------------------------------------------------------

MultiPoly laurent_tree_term(const StableGraph& G, const std::vector<int>& tree, bool top,
                            const SeriesLimits& lim, const std::vector<std::string>& order) {
    int E = G.num_edges();
    TreeFactors tf = tree_factors(G, tree);

    std::vector<TruncSeries> factors;
    for (int e : tree)
        factors.push_back(exp_of(TruncSeries::from_poly(tf.charge_form[e] * MultiPoly::var(zvar(e)), order, lim)));
    for (const auto& [e, form] : tf.cycle_form) {
        TruncSeries f = laurent_invert_linear(form, order, lim);
        if (!top) {
            std::vector<Rational> tail(lim.total_cap + 1);
            for (int d = 0; d <= lim.total_cap; ++d) tail[d] = bernoulli(d + 1) / factorial(d + 1);
            f += compose_linear(tail, form, order, lim);
        }
        factors.push_back(f.shifted(Monomial{{zvar(e), 1}}));
    }

    // Suffix exponent/degree envelopes: a partial product survives only if the
    // remaining factors can still steer every z_e exponent to exactly 2.
    int k = (int)factors.size();
    std::vector<std::map<std::string, int>> sufmin(k + 1), sufmax(k + 1);
    std::vector<int> sufmindeg(k + 1, 0), sufmaxdeg(k + 1, 0);
    for (int i = k - 1; i >= 0; --i) {
        std::map<std::string, int> mn, mx;
        int mndeg = 0, mxdeg = 0;
        bool first = true;
        for (const auto& [m, c] : factors[i].terms) {
            int d = mono_degree(m);
            std::map<std::string, int> full;
            for (const auto& v : order) {
                auto it = m.find(v);
                full[v] = (it == m.end()) ? 0 : it->second;
            }
            if (first) { mn = mx = full; mndeg = mxdeg = d; first = false; continue; }
            for (const auto& v : order) {
                mn[v] = std::min(mn[v], full[v]);
                mx[v] = std::max(mx[v], full[v]);
            }
            mndeg = std::min(mndeg, d);
            mxdeg = std::max(mxdeg, d);
        }
        if (first)
            throw std::logic_error("laurent fold: empty factor (window too narrow)");
        sufmin[i] = mn;
        sufmax[i] = mx;
        for (const auto& v : order) {
            sufmin[i][v] += sufmin[i + 1].count(v) ? sufmin[i + 1][v] : 0;
            sufmax[i][v] += sufmax[i + 1].count(v) ? sufmax[i + 1][v] : 0;
        }
        sufmindeg[i] = mndeg + sufmindeg[i + 1];
        sufmaxdeg[i] = mxdeg + sufmaxdeg[i + 1];
    }

    std::map<Monomial, MultiPoly> acc;
    acc[{}] = MultiPoly(Rational(1));
    for (int i = 0; i < k; ++i) {
        std::map<Monomial, MultiPoly> next;
        for (const auto& [ma, ca] : acc)
            for (const auto& [mf, cf] : factors[i].terms) {
                Monomial m = mono_mul(ma, mf);
                if (!lim.keeps(m)) continue;
                int d = mono_degree(m);
                if (d + sufmindeg[i + 1] > 2 * E || d + sufmaxdeg[i + 1] < 2 * E) continue;
                bool ok = true;
                for (const auto& v : order) {
                    auto it = m.find(v);
                    int e = (it == m.end()) ? 0 : it->second;
                    int lo = sufmin[i + 1].count(v) ? sufmin[i + 1].at(v) : 0;
                    int hi = sufmax[i + 1].count(v) ? sufmax[i + 1].at(v) : 0;
                    if (e + lo > 2 || e + hi < 2) { ok = false; break; }
                }
                if (!ok) continue;
                MultiPoly prod = ca * cf;
                if (prod.is_zero()) continue;
                auto it = next.find(m);
                if (it == next.end())
                    next.emplace(m, std::move(prod));
                else {
                    it->second += prod;
                    if (it->second.is_zero()) next.erase(it);
                }
            }
        acc.swap(next);
    }

    Monomial target;
    for (int e = 0; e < E; ++e) target[zvar(e)] = 2;
    auto it = acc.find(target);
    return it == acc.end() ? MultiPoly() : it->second;
}

// Packed fast path for the same fold. z-monomials are encoded as biased
// 16-bit exponent fields of a 128-bit key (graphs with at most 8 edges), so
// the hot loop compares integers instead of string-keyed maps; the math and
// the truncation rules are identical to the TruncSeries fold above.
namespace packed {

using Key = unsigned __int128;
constexpr int kFieldBits = 16;
constexpr int kBias = 1 << 14;
constexpr int kMaxVars = 8;

inline Key one_key(int E) {
    Key k = 0;
    for (int i = 0; i < E; ++i) k |= (Key)kBias << (kFieldBits * i);
    return k;
}
inline int key_get(Key k, int i) {
    return (int)((k >> (kFieldBits * i)) & 0xffff) - kBias;
}
// exponent vectors add; the bias of the second operand is subtracted out
inline Key key_mul(Key a, Key b, Key bias) { return a + b - bias; }
inline Key key_shift(Key k, int i, int by) {
    return by >= 0 ? k + ((Key)by << (kFieldBits * i)) : k - ((Key)(-by) << (kFieldBits * i));
}

// Charge-variable (av*) polynomials, packed the same way: 8 bits of exponent
// per vertex in a 64-bit key, terms sorted by key. Exponents are nonnegative
// and bounded by the degree cap, so fields never interact.
using CKey = std::uint64_t;
using CoeffPoly = std::vector<std::pair<CKey, Rational>>;

inline CoeffPoly cp_from_poly(const MultiPoly& p) {
    CoeffPoly r;
    for (const auto& [m, c] : p.terms) {
        CKey k = 0;
        for (const auto& [v, e] : m) k += (CKey)e << (8 * std::stoi(v.substr(2)));
        r.emplace_back(k, c);
    }
    std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return r;
}

inline MultiPoly cp_to_poly(const CoeffPoly& p, int V) {
    MultiPoly r;
    for (const auto& [k, c] : p) {
        Monomial m;
        for (int v = 0; v < V; ++v) {
            int e = (int)((k >> (8 * v)) & 0xff);
            if (e) m[charge_var(v)] = e;
        }
        r.add_term(m, c);
    }
    return r;
}

inline CoeffPoly cp_scale(const CoeffPoly& a, const Rational& c) {
    CoeffPoly r = a;
    for (auto& t : r) t.second *= c;
    return r;
}

inline CoeffPoly cp_mul(const CoeffPoly& a, const CoeffPoly& b) {
    if (a.size() == 1 && a[0].first == 0) return cp_scale(b, a[0].second);
    if (b.size() == 1 && b[0].first == 0) return cp_scale(a, b[0].second);
    std::map<CKey, Rational> acc;
    for (const auto& [ka, ca] : a)
        for (const auto& [kb, cb] : b) {
            auto [it, fresh] = acc.emplace(ka + kb, ca * cb);
            if (!fresh) it->second += ca * cb;
        }
    CoeffPoly r;
    for (auto& [k, c] : acc)
        if (c != 0) r.emplace_back(k, c);
    return r;
}

inline void cp_add_inplace(CoeffPoly& a, const CoeffPoly& b) {
    CoeffPoly r;
    r.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            r.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            r.push_back(b[j++]);
        } else {
            Rational c = a[i].second + b[j].second;
            if (c != 0) r.emplace_back(a[i].first, c);
            ++i, ++j;
        }
    }
    a.swap(r);
}

struct PackedTerm {
    Key key;
    CoeffPoly coeff;
};

inline int key_degree(Key k, int E) {
    int d = 0;
    for (int i = 0; i < E; ++i) d += key_get(k, i);
    return d;
}

inline bool key_keeps(Key k, int E, const SeriesLimits& lim) {
    if (key_degree(k, E) > lim.total_cap) return false;
    for (int i = 0; i < E; ++i) {
        int e = key_get(k, i);
        if (e < lim.floor || e > lim.ceil) return false;
    }
    return true;
}

// form as sparse (edge index, +-1 coefficient) pairs, expanded to form^d for
// d = 0..cap with exact multinomials; every monomial of form^d has degree d.
// Cycle forms have unit coefficients, so the multinomials stay in long range.
std::vector<std::vector<std::pair<Key, long>>>
form_powers(const std::vector<std::pair<int, long>>& form, int cap, Key one) {
    std::vector<std::vector<std::pair<Key, long>>> pw(cap + 1);
    pw[0] = {{one, 1}};
    for (int d = 1; d <= cap; ++d) {
        std::map<Key, long> acc;
        for (const auto& [k, c] : pw[d - 1])
            for (const auto& [e, s] : form) acc[key_shift(k, e, 1)] += c * s;
        for (auto& [k, c] : acc)
            if (c != 0) pw[d].emplace_back(k, c);
    }
    return pw;
}

using RatTerms = std::vector<std::pair<Key, Rational>>;

// z_e * (1/z_{e,T} + sum_d B_{d+1}/(d+1)! z_{e,T}^d), matching the generic
// laurent_invert_linear/compose_linear truncation (lead variable = earliest
// edge index in the form; j capped by both the window and the degree cap).
RatTerms free_edge_factor_uncached(int e, const MultiPoly& form, bool top, int E,
                                   const SeriesLimits& lim) {
    std::vector<std::pair<int, long>> sparse;
    for (const auto& [m, c] : form.terms) {
        const std::string& v = m.begin()->first;
        if (c != 1 && c != -1)
            throw std::logic_error("free_edge_factor: cycle form coefficient not a unit");
        sparse.emplace_back(std::stoi(v.substr(1)), c == 1 ? 1 : -1);
    }
    std::sort(sparse.begin(), sparse.end());
    int lead = sparse.front().first;
    long cl = sparse.front().second;
    std::vector<std::pair<int, long>> rest(sparse.begin() + 1, sparse.end());

    Key one = one_key(E);
    std::map<Key, Rational> f;
    auto add = [&](Key k, const Rational& c) {
        if (c == 0 || !key_keeps(k, E, lim)) return;
        auto [it, fresh] = f.emplace(k, c);
        if (!fresh) {
            it->second += c;
            if (it->second == 0) f.erase(it);
        }
    };

    auto restpow = form_powers(rest, lim.total_cap, one);
    long cpow = cl;
    for (int j = 0; -1 - j >= lim.floor && j <= lim.total_cap; ++j) {
        long scale = (j % 2 == 0 ? 1 : -1) * cpow; // cpow = cl^{j+1} = +-1
        for (const auto& [k, c] : restpow[j]) add(key_shift(k, lead, -1 - j), Rational(c * scale));
        cpow *= cl;
        if (rest.empty()) break;
    }
    if (!top) {
        auto formpow = form_powers(sparse, lim.total_cap, one);
        for (int d = 0; d <= lim.total_cap; ++d) {
            Rational t = bernoulli(d + 1) / factorial(d + 1);
            for (const auto& [k, c] : formpow[d]) add(k, c * t);
        }
    }

    RatTerms out;
    for (const auto& [k, c] : f) {
        Key nk = key_shift(k, e, 1);
        if (key_keeps(nk, E, lim)) out.emplace_back(nk, c);
    }
    return out;
}

// Every exponent this factor produces lies in [-(cap+1), cap+1], so as long
// as the window is at least cap+2 (true for the initial window 2E+2 and all
// escalations) the result does not depend on the window and can be shared.
std::shared_ptr<const RatTerms> free_edge_factor(int e, const MultiPoly& form, bool top, int E,
                                                 const SeriesLimits& lim) {
    if (lim.floor > -(lim.total_cap + 2) || lim.ceil < lim.total_cap + 1)
        return std::make_shared<RatTerms>(free_edge_factor_uncached(e, form, top, E, lim));
    std::ostringstream key;
    key << (top ? 'T' : 'F') << E << ';' << lim.total_cap << ';' << e << ';' << form.to_string();
    static std::map<std::string, std::shared_ptr<const RatTerms>> memo;
    static std::mutex lock;
    {
        std::scoped_lock guard(lock);
        auto it = memo.find(key.str());
        if (it != memo.end()) return it->second;
    }
    auto r = std::make_shared<const RatTerms>(free_edge_factor_uncached(e, form, top, E, lim));
    std::scoped_lock guard(lock);
    return memo.emplace(key.str(), r).first->second;
}

// A fold factor is either a rational-coefficient term list (free edges,
// shared via the memo) or a charge-polynomial one (tree-edge exponentials).
struct Factor {
    std::shared_ptr<const RatTerms> rat;
    std::vector<PackedTerm> poly;

    size_t size() const { return rat ? rat->size() : poly.size(); }
    Key key_at(size_t i) const { return rat ? (*rat)[i].first : poly[i].key; }
};

MultiPoly tree_term(const StableGraph& G, const std::vector<int>& tree, bool top,
                    const SeriesLimits& lim) {
    int E = G.num_edges(), V = G.num_vertices();
    TreeFactors tf = tree_factors(G, tree);
    Key one = one_key(E);

    std::vector<Factor> factors;
    for (int e : tree) {
        Factor f;
        CoeffPoly base = cp_from_poly(tf.charge_form[e]);
        CoeffPoly p{{0, Rational(1)}};
        for (int j = 0; j <= std::min(lim.total_cap, lim.ceil); ++j) {
            if (j > 0) {
                p = cp_scale(cp_mul(p, base), Rational(1, j));
                if (p.empty()) break;
            }
            f.poly.push_back({key_shift(one, e, j), p});
        }
        factors.push_back(std::move(f));
    }
    for (const auto& [e, form] : tf.cycle_form)
        factors.push_back({free_edge_factor(e, form, top, E, lim), {}});

    // Suffix exponent/degree envelopes, as in the generic fold.
    int k = (int)factors.size();
    std::vector<std::array<int, kMaxVars>> sufmin(k + 1), sufmax(k + 1);
    std::vector<int> sufmindeg(k + 1, 0), sufmaxdeg(k + 1, 0);
    sufmin[k].fill(0);
    sufmax[k].fill(0);
    for (int i = k - 1; i >= 0; --i) {
        if (factors[i].size() == 0)
            throw std::logic_error("laurent fold: empty factor (window too narrow)");
        std::array<int, kMaxVars> mn{}, mx{};
        int mndeg = 0, mxdeg = 0;
        for (size_t t = 0; t < factors[i].size(); ++t) {
            Key key = factors[i].key_at(t);
            int d = key_degree(key, E);
            if (t == 0) {
                for (int v = 0; v < E; ++v) mn[v] = mx[v] = key_get(key, v);
                mndeg = mxdeg = d;
                continue;
            }
            for (int v = 0; v < E; ++v) {
                int e = key_get(key, v);
                mn[v] = std::min(mn[v], e);
                mx[v] = std::max(mx[v], e);
            }
            mndeg = std::min(mndeg, d);
            mxdeg = std::max(mxdeg, d);
        }
        for (int v = 0; v < E; ++v) {
            sufmin[i][v] = mn[v] + sufmin[i + 1][v];
            sufmax[i][v] = mx[v] + sufmax[i + 1][v];
        }
        sufmindeg[i] = mndeg + sufmindeg[i + 1];
        sufmaxdeg[i] = mxdeg + sufmaxdeg[i + 1];
    }

    std::map<Key, CoeffPoly> acc;
    acc.emplace(one, CoeffPoly{{0, Rational(1)}});
    for (int i = 0; i < k; ++i) {
        std::map<Key, CoeffPoly> next;
        const Factor& fac = factors[i];
        for (const auto& [ka, ca] : acc)
            for (size_t t = 0; t < fac.size(); ++t) {
                Key m = key_mul(ka, fac.key_at(t), one);
                if (!key_keeps(m, E, lim)) continue;
                int d = key_degree(m, E);
                if (d + sufmindeg[i + 1] > 2 * E || d + sufmaxdeg[i + 1] < 2 * E) continue;
                bool ok = true;
                for (int v = 0; v < E; ++v) {
                    int e = key_get(m, v);
                    if (e + sufmin[i + 1][v] > 2 || e + sufmax[i + 1][v] < 2) { ok = false; break; }
                }
                if (!ok) continue;
                CoeffPoly prod = fac.rat ? cp_scale(ca, (*fac.rat)[t].second)
                                         : cp_mul(ca, fac.poly[t].coeff);
                if (prod.empty()) continue;
                auto it = next.find(m);
                if (it == next.end())
                    next.emplace(m, std::move(prod));
                else {
                    cp_add_inplace(it->second, prod);
                    if (it->second.empty()) next.erase(it);
                }
            }
        acc.swap(next);
    }

    Key target = one;
    for (int e = 0; e < E; ++e) target = key_shift(target, e, 2);
    auto it = acc.find(target);
    return it == acc.end() ? MultiPoly() : cp_to_poly(it->second, V);
}

} // namespace packed

MultiPoly laurent_eval(const StableGraph& G, bool top, int window, const EvalConfig& cfg) {
    int E = G.num_edges();
    SeriesLimits lim{2 * E, -window, window};
    std::vector<std::string> order;
    for (int e = 0; e < E; ++e) order.push_back(zvar(e));
    bool use_packed = E <= packed::kMaxVars && G.num_vertices() <= packed::kMaxVars &&
                      window < packed::kBias / 2;

    auto trees = spanning_trees(G);
    std::vector<MultiPoly> contrib(trees.size());
    parallel_for((long)trees.size(), cfg.jobs, [&](long i) {
        contrib[i] = use_packed ? packed::tree_term(G, trees[i], top, lim)
                                : laurent_tree_term(G, trees[i], top, lim, order);
    });
    MultiPoly total;
    for (const auto& c : contrib) total += c;
    if (E % 2 == 1) total = -total;
    return total;
}

// ---------------------------------------------------------------------------
// Division strategy: put every tree term over the product of the distinct
// cycle forms, then divide out the linear factors exactly.
// ---------------------------------------------------------------------------

bool is_zvar(const std::string& v) { return !v.empty() && v[0] == 'z'; }

int zdeg(const Monomial& m) {
    int d = 0;
    for (const auto& [v, e] : m)
        if (is_zvar(v)) d += e;
    return d;
}

MultiPoly ztruncate(const MultiPoly& p, int bound) {
    MultiPoly r;
    for (const auto& [m, c] : p.terms)
        if (zdeg(m) <= bound) r.terms.emplace(m, c);
    return r;
}

MultiPoly mul_ztrunc(const MultiPoly& a, const MultiPoly& b, int bound) {
    MultiPoly r;
    for (const auto& [ma, ca] : a.terms) {
        int da = zdeg(ma);
        for (const auto& [mb, cb] : b.terms) {
            if (da + zdeg(mb) > bound) continue;
            r.add_term(mono_mul(ma, mb), ca * cb);
        }
    }
    return r;
}

// exp(form * z_e) truncated at z-degree <= bound (form has no z variables).
MultiPoly exp_charge_factor(const MultiPoly& form, int e, int bound) {
    MultiPoly r(Rational(1)), fp(Rational(1));
    for (int j = 1; j <= bound; ++j) {
        fp *= form;
        if (fp.is_zero()) break;
        r += Rational(1) / factorial(j) * fp * MultiPoly::var(zvar(e), j);
    }
    return r;
}

// u/(e^u - 1) evaluated at a homogeneous linear z-form, truncated.
MultiPoly psi_hat_factor(const MultiPoly& form, int bound) {
    MultiPoly r, fp(Rational(1));
    for (int m = 0; m <= bound; ++m) {
        r += bernoulli(m) / factorial(m) * fp;
        fp = ztruncate(fp * form, bound);
        if (fp.is_zero()) break;
    }
    return r;
}

// Exact division of P (z-truncated at `bound`) by a homogeneous linear z-form,
// homogeneous z-degree by homogeneous z-degree; throws if a remainder appears.
MultiPoly divide_linear_form(const MultiPoly& P, const MultiPoly& f, int bound,
                             const std::vector<std::string>& order) {
    std::string lead;
    Rational c;
    for (const auto& v : order) {
        MultiPoly cf = f.coefficient_of(v, 1);
        if (!cf.is_zero()) { lead = v; c = cf.as_rational(); break; }
    }
    if (lead.empty()) throw std::logic_error("divide_linear_form: zero form");
    MultiPoly h = f - c * MultiPoly::var(lead);

    // group by z-degree, then by lead exponent within each block
    std::map<int, std::map<int, MultiPoly>> blocks; // zdeg -> lead exp -> rest
    for (const auto& [m, q] : P.terms) {
        auto it = m.find(lead);
        int i = (it == m.end()) ? 0 : it->second;
        Monomial rest = m;
        rest.erase(lead);
        MultiPoly part;
        part.terms.emplace(rest, q);
        auto& slot = blocks[zdeg(m)][i];
        slot += part;
    }

    MultiPoly Q;
    for (auto& [d, byexp] : blocks) {
        if (d == 0) {
            if (!byexp.empty())
                throw std::runtime_error("division strategy: denominator does not divide numerator");
            continue;
        }
        int imax = byexp.rbegin()->first;
        std::map<int, MultiPoly> q; // lead exp -> quotient coefficient
        MultiPoly qi;               // q at exponent i (starts above imax: zero)
        for (int i = imax; i >= 1; --i) {
            MultiPoly pi = byexp.count(i) ? byexp[i] : MultiPoly();
            MultiPoly qim1 = (pi - h * qi) / c;
            q[i - 1] = qim1;
            qi = qim1;
        }
        MultiPoly p0 = byexp.count(0) ? byexp[0] : MultiPoly();
        if (!(p0 - h * qi).is_zero())
            throw std::runtime_error("division strategy: denominator does not divide numerator");
        for (const auto& [i, qc] : q) Q += qc * MultiPoly::var(lead, i);
    }
    (void)bound;
    return Q;
}

MultiPoly division_eval(const StableGraph& G, bool top, const EvalConfig& cfg) {
    int E = G.num_edges();
    auto trees = spanning_trees(G);
    std::vector<std::string> order;
    for (int e = 0; e < E; ++e) order.push_back(zvar(e));

    // The summed numerator is divisible by the cleared denominator only
    // modulo sum(a_v) = 0 (opposite-residue poles cancel across trees under
    // the relation), so charge forms are normalized before clearing.
    Relation rel = charge_relation(G);

    // distinct cycle forms across all trees = the common denominator
    std::map<std::string, MultiPoly> all_forms;
    std::vector<TreeFactors> tfs;
    for (const auto& tree : trees) {
        tfs.push_back(tree_factors(G, tree));
        for (auto& [e, form] : tfs.back().charge_form) form = poly_normalize(form, rel);
        for (const auto& [e, form] : tfs.back().cycle_form) all_forms.emplace(form.to_string(), form);
    }
    int k = (int)all_forms.size();
    int bound = 2 * E + k;

    std::vector<MultiPoly> contrib(trees.size());
    parallel_for((long)trees.size(), cfg.jobs, [&](long t) {
        const TreeFactors& tf = tfs[t];
        MultiPoly term(Rational(1));
        std::set<std::string> own;
        for (const auto& [e, form] : tf.cycle_form) own.insert(form.to_string());
        for (int e : trees[t]) term = mul_ztrunc(term, exp_charge_factor(tf.charge_form.at(e), e, bound), bound);
        for (const auto& [e, form] : tf.cycle_form) {
            term = mul_ztrunc(term, MultiPoly::var(zvar(e)), bound);
            if (!top) term = mul_ztrunc(term, psi_hat_factor(form, bound), bound);
        }
        for (const auto& [key, form] : all_forms)
            if (!own.count(key)) term = mul_ztrunc(term, form, bound);
        contrib[t] = term;
    });
    MultiPoly N;
    for (const auto& c : contrib) N += c;

    MultiPoly Q = N;
    int b = bound;
    for (const auto& [key, form] : all_forms) {
        Q = divide_linear_form(Q, form, b, order);
        --b;
    }

    MultiPoly res = Q;
    for (int e = 0; e < E; ++e) res = res.coefficient_of(zvar(e), 2);
    if (E % 2 == 1) res = -res;
    return res;
}

// ---------------------------------------------------------------------------
// Oracle: numeric constant terms + multivariate interpolation.
// ---------------------------------------------------------------------------

Rational constant_term_numeric(const StableGraph& G, const std::vector<long>& charges,
                               const EvalConfig& cfg) {
    int E = G.num_edges();
    long maxabs = 1;
    for (long a : charges) maxabs = std::max(maxabs, std::abs(a));
    long R0 = 4 * E * maxabs + 5;
    int samples = 2 * E + 3; // fits degree <= 2E+2; actual degree is <= 2E

    for (int attempt = 0; attempt <= cfg.escalation_limit; ++attempt, R0 *= 2) {
        std::vector<Rational> xs, ys;
        for (int i = 0; i < samples + 2; ++i) {
            long r = R0 + i;
            double weightings = std::pow((double)r, h1(G));
            if (weightings > (double)cfg.enumeration_budget)
                throw std::runtime_error("oracle: enumeration budget exceeded at r=" + std::to_string(r));
            xs.push_back(Rational(r));
            ys.push_back(weighting_sum(G, charges, r));
        }
        std::vector<Rational> fit(xs.begin(), xs.begin() + samples);
        std::vector<Rational> fity(ys.begin(), ys.begin() + samples);
        auto coeffs = newton_interpolate(fit, fity);
        bool ok = true;
        for (int i = samples; i < samples + 2; ++i)
            if (eval_poly(coeffs, xs[i]) != ys[i]) { ok = false; break; }
        if (ok) return coeffs.empty() ? Rational(0) : coeffs[0];
    }
    throw std::runtime_error("oracle: sampled values never stabilized to a polynomial in r");
}

std::vector<Monomial> monomial_basis(const std::vector<std::string>& vars, int maxdeg) {
    std::vector<Monomial> basis;
    Monomial cur;
    std::function<void(size_t, int)> rec = [&](size_t i, int left) {
        if (i == vars.size()) {
            basis.push_back(cur);
            return;
        }
        for (int e = 0; e <= left; ++e) {
            if (e > 0) cur[vars[i]] = e;
            rec(i + 1, left - e);
        }
        cur.erase(vars[i]);
    };
    rec(0, maxdeg);
    std::sort(basis.begin(), basis.end());
    return basis;
}

MultiPoly oracle_fit(const StableGraph& G, const EvalConfig& cfg, std::string& provenance) {
    int V = G.num_vertices(), E = G.num_edges();
    if (V == 1) {
        Rational v = constant_term_numeric(G, {0}, cfg);
        provenance = "direct; single vertex, charge 0";
        return MultiPoly(v);
    }
    std::vector<std::string> vars;
    for (int v = 1; v < V; ++v) vars.push_back(charge_var(v));
    auto basis = monomial_basis(vars, 2 * E);

    long B = 2 * E + 1; // grid bound, also caps |av0|
    int m = V - 1;

    // integer tuples by growing max-abs shells, lexicographic within a shell
    std::vector<std::vector<long>> pool;
    std::vector<Rational> values;
    auto add_shell = [&](long s) {
        std::vector<long> t(m, -s);
        for (;;) {
            long mx = 0, sum = 0;
            for (long c : t) { mx = std::max(mx, std::abs(c)); sum += c; }
            if (mx == s && std::abs(sum) <= B) pool.push_back(t);
            int i = m - 1;
            while (i >= 0 && t[i] == s) t[i--] = -s;
            if (i < 0) break;
            ++t[i];
        }
    };

    long shell = 0;
    size_t need = basis.size() + 2;
    while (pool.size() < need && shell <= B) add_shell(shell++);

    for (;;) {
        size_t old = values.size();
        values.resize(pool.size());
        parallel_for((long)(pool.size() - old), cfg.jobs, [&](long j) {
            size_t i = old + (size_t)j;
            std::vector<long> charges(V);
            long sum = 0;
            for (int v = 1; v < V; ++v) { charges[v] = pool[i][v - 1]; sum += charges[v]; }
            charges[0] = -sum;
            values[i] = constant_term_numeric(G, charges, cfg);
        });

        std::vector<std::vector<Rational>> A(pool.size(), std::vector<Rational>(basis.size()));
        for (size_t i = 0; i < pool.size(); ++i) {
            std::map<std::string, Rational> pt;
            for (int v = 1; v < V; ++v) pt[charge_var(v)] = Rational(pool[i][v - 1]);
            for (size_t j = 0; j < basis.size(); ++j) {
                Rational val = 1;
                for (const auto& [var, exp] : basis[j])
                    for (int q = 0; q < exp; ++q) val *= pt[var];
                A[i][j] = val;
            }
        }
        auto sol = solve_exact(A, values);
        if (sol.unique && sol.consistent) {
            MultiPoly p;
            for (size_t j = 0; j < basis.size(); ++j) p.add_term(basis[j], sol.solution[j]);
            std::ostringstream prov;
            prov << "tuples=" << pool.size() << "; grid bound " << B << "; r-samples " << (2 * E + 5)
                 << " starting at 4|E|max+5";
            provenance = prov.str();
            return p;
        }
        if (!sol.consistent)
            throw std::runtime_error("oracle: interpolation inconsistent (sampled values not polynomial)");
        if (shell > B)
            throw std::runtime_error("oracle: charge grid exhausted before interpolation became unique");
        add_shell(shell++);
    }
}

// ---------------------------------------------------------------------------
// Disk cache plumbing. Values are stored in the canonical vertex labeling and
// re-expressed (then re-normalized) in the caller's labeling on retrieval.
// ---------------------------------------------------------------------------

MultiPoly rename_charges(const MultiPoly& p, const std::vector<int>& perm) {
    MultiPoly r;
    for (const auto& [m, c] : p.terms) {
        Monomial nm;
        for (const auto& [v, e] : m) {
            if (v.rfind("av", 0) == 0) {
                int idx = std::stoi(v.substr(2));
                if (idx >= 0 && idx < (int)perm.size()) {
                    nm[charge_var(perm[idx])] = e;
                    continue;
                }
            }
            nm[v] = e;
        }
        r.add_term(nm, c);
    }
    return r;
}

MultiPoly cached_eval(const StableGraph& G, const std::string& method, const EvalConfig& cfg,
                      const std::function<MultiPoly()>& compute) {
    if (!cfg.use_cache) return compute();
    auto [canon, perm] = canonical_form_with_perm(G);
    std::string key = canon + "|" + method + "|schema" + std::to_string(kSchemaVersion);
    std::string dir = resolve_cache_dir(cfg.cache_dir);

    if (auto hit = cache_get(dir, key)) {
        try {
            auto j = nlohmann::json::parse(*hit);
            if (j.at("key").get<std::string>() == key) {
                std::vector<int> inv(perm.size());
                for (size_t v = 0; v < perm.size(); ++v) inv[perm[v]] = (int)v;
                MultiPoly stored = poly_from_json(j.at("value"));
                return poly_normalize(rename_charges(stored, inv), charge_relation(G));
            }
        } catch (const std::exception&) {
            // unreadable entry: fall through and recompute
        }
    }
    MultiPoly v = compute();
    nlohmann::json j;
    j["schema"] = kSchemaVersion;
    j["key"] = key;
    j["method"] = method;
    j["value"] = poly_to_json(rename_charges(v, perm));
    cache_put(dir, key, j.dump());
    return v;
}

MultiPoly zagier_value(const StableGraph& G, ZagierStrategy strategy, bool top, const EvalConfig& cfg,
                       std::string& provenance) {
    int E = G.num_edges();
    if (strategy == ZagierStrategy::Division) {
        provenance = "common-denominator division, z-degree bound " + std::to_string(2 * E) + "+|forms|";
        return poly_normalize(division_eval(G, top, cfg), charge_relation(G));
    }
    int window = 2 * E + 2;
    MultiPoly prev = laurent_eval(G, top, window, cfg);
    for (int attempt = 0; attempt < cfg.escalation_limit; ++attempt) {
        window *= 2;
        MultiPoly cur = laurent_eval(G, top, window, cfg);
        if (cur == prev) {
            provenance = "laurent window stabilized at +-" + std::to_string(window / 2);
            return poly_normalize(prev, charge_relation(G));
        }
        prev = cur;
    }
    throw std::runtime_error("laurent strategy: window escalation did not stabilize");
}

} // namespace

Relation charge_relation(const StableGraph& G) {
    Relation rel;
    for (int v = 0; v < G.num_vertices(); ++v) rel.form += MultiPoly::var(charge_var(v));
    rel.eliminated = charge_var(0);
    return rel;
}

Rational weighting_sum(const StableGraph& G, const std::vector<long>& charges, long r) {
    if (r < 1) throw std::invalid_argument("weighting_sum: r must be positive");
    if ((int)charges.size() != G.num_vertices())
        throw std::invalid_argument("weighting_sum: one charge per vertex required");
    WeightingEnumerator en(G, charges, r);
    Integer total = en.accumulate();
    Rational res(total);
    res /= Integer(1) << G.num_edges(); // the 1/2 per edge
    for (int i = 0; i < h1(G); ++i) res /= r;
    return res;
}

GraphInvariant cg_oracle(const StableGraph& G, const EvalConfig& cfg) {
    G.validate();
    GraphInvariant inv;
    inv.graph = G;
    inv.method = "oracle";
    std::string prov;
    inv.value = cached_eval(G, inv.method, cfg, [&] { return oracle_fit(G, cfg, prov); });
    inv.provenance = prov.empty() ? "cache" : prov;
    return inv;
}

GraphInvariant cg_zagier(const StableGraph& G, ZagierStrategy strategy, const EvalConfig& cfg) {
    G.validate();
    GraphInvariant inv;
    inv.graph = G;
    inv.method = strategy == ZagierStrategy::Laurent ? "zagier-laurent" : "zagier-division";
    std::string prov;
    inv.value = cached_eval(G, inv.method, cfg,
                            [&] { return zagier_value(G, strategy, false, cfg, prov); });
    inv.provenance = prov.empty() ? "cache" : prov;
    return inv;
}

GraphInvariant cg_top(const StableGraph& G, ZagierStrategy strategy, const EvalConfig& cfg) {
    G.validate();
    GraphInvariant inv;
    inv.graph = G;
    inv.method = (strategy == ZagierStrategy::Laurent ? "zagier-laurent" : "zagier-division");
    inv.method += "-top";
    std::string prov;
    inv.value = cached_eval(G, inv.method, cfg,
                            [&] { return zagier_value(G, strategy, true, cfg, prov); });
    inv.provenance = prov.empty() ? "cache" : prov;
    return inv;
}

SpecializationData SpecializationData::symbolic(int n) {
    SpecializationData s;
    s.b = MultiPoly::var("b");
    for (int i = 1; i <= n; ++i) s.leg_charges.push_back(MultiPoly::var("a" + std::to_string(i)));
    return s;
}

MultiPoly specialize(const GraphInvariant& inv, const SpecializationData& spec) {
    const StableGraph& G = inv.graph;
    int n = G.num_legs(), V = G.num_vertices();
    if ((int)spec.leg_charges.size() < n)
        throw std::invalid_argument("specialize: fewer leg charges than markings");
    if (!spec.delta.empty() && (int)spec.delta.size() < V)
        throw std::invalid_argument("specialize: delta vector shorter than vertex count");

    // charge-sum consistency for fully numeric input
    bool numeric = spec.b.is_constant();
    for (int i = 0; i < n; ++i) numeric = numeric && spec.leg_charges[i].is_constant();
    if (numeric) {
        Rational lhs = 0;
        for (int i = 0; i < n; ++i) lhs += spec.leg_charges[i].constant_term();
        Rational rhs = Rational(2 * G.genus() - 2 + n) * spec.b.constant_term();
        for (const auto& d : spec.delta) rhs += d;
        if (lhs != rhs)
            throw std::invalid_argument("specialize: charges violate sum(a_i) = (2g-2+n) b + sum(delta)");
    }

    MultiPoly out = inv.value;
    for (int v = 0; v < V; ++v) {
        const auto& vx = G.vertices[v];
        bool subdivision_vertex =
            G.semistable && vx.genus == 0 && vx.legs.empty() && G.edge_ends(v) == 2;
        MultiPoly expr;
        if (!subdivision_vertex) {
            for (int l : vx.legs) expr += spec.leg_charges[l - 1];
            expr -= Rational(2 * vx.genus - 2 + G.valence(v)) * spec.b;
            if (!spec.delta.empty()) expr -= MultiPoly(spec.delta[v]);
        }
        out = out.substitute(charge_var(v), expr);
    }
    if (spec.ambient) out = poly_normalize(out, *spec.ambient);
    return out;
}

// Shared body: the edge series [1 - exp(-w w' (psi+psi')/2)]/(psi+psi') has
// (psi+psi')^d coefficient (-1)^d/(d+1)! times the product of d+1 copies of
// w w'/2, which is what the subdivided graph's invariant computes; the scalar
// prefactor is reinstated here.
static MultiPoly dr_coeff_impl(const StableGraph& G, const std::vector<int>& edge_psi,
                               const SpecializationData& spec, ZagierStrategy strategy,
                               const EvalConfig& cfg, bool top_part) {
    if ((int)edge_psi.size() != G.num_edges())
        throw std::invalid_argument("dr_coeff: one subdivision depth per edge required");
    StableGraph H = G;
    Rational scale = 1;
    for (int e = 0; e < G.num_edges(); ++e) {
        if (edge_psi[e] < 0) throw std::invalid_argument("dr_coeff: negative subdivision depth");
        if (edge_psi[e] > 0) H = subdivide(H, e, edge_psi[e]);
        scale *= Rational((edge_psi[e] % 2 == 0) ? 1 : -1) / factorial(edge_psi[e] + 1);
    }
    GraphInvariant inv = top_part ? cg_top(H, strategy, cfg) : cg_zagier(H, strategy, cfg);
    SpecializationData sp = spec;
    if (!sp.delta.empty()) sp.delta.resize(H.num_vertices(), Rational(0));
    return scale * specialize(inv, sp);
}

MultiPoly dr_coeff(const StableGraph& G, const std::vector<int>& edge_psi,
                   const SpecializationData& spec, ZagierStrategy strategy, const EvalConfig& cfg) {
    return dr_coeff_impl(G, edge_psi, spec, strategy, cfg, false);
}

MultiPoly dr_coeff_top(const StableGraph& G, const std::vector<int>& edge_psi,
                       const SpecializationData& spec, ZagierStrategy strategy, const EvalConfig& cfg) {
    return dr_coeff_impl(G, edge_psi, spec, strategy, cfg, true);
}

} // namespace drcalc
