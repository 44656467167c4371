#pragma once

// The DR graph invariant C(G) of a stable graph with vertex charges:
//
//   C(G)({a_v}) = [ r^{-h1} sum_{w in W_{G,r}} prod_{e=(h,h')} (1/2) w(h) w(h') ]_{constant term in r}
//
// computed two independent ways: directly from the definition for integer
// charges with interpolation (the oracle), and via Zagier's spanning-tree
// formula with Laurent coefficient extraction (laurent/division strategies).
// Values are polynomials in the vertex charge variables av0, av1, ...,
// normalized modulo sum(a_v) = 0 by eliminating av0.

#include "drcalc/graph.hpp"
#include "drcalc/multipoly.hpp"

#include <optional>

namespace drcalc {

inline std::string charge_var(int v) { return "av" + std::to_string(v); }

// Relation sum_v a_v = 0 eliminating av0, the normalization for C(G) values.
Relation charge_relation(const StableGraph& G);

struct EvalConfig {
    int escalation_limit = 4;   // window / R0 doublings before giving up
    long enumeration_budget = 200000000; // max r^h1 weightings per sample
    bool use_cache = true;
    std::string cache_dir;      // empty: DRCALC_CACHE_DIR or ./.drcalc-cache
    int jobs = 0;               // 0: DRCALC_JOBS or hardware
};

struct GraphInvariant {
    StableGraph graph;
    MultiPoly value;      // in charge_var(v), av0 eliminated
    std::string method;   // oracle | zagier-laurent | zagier-division (+ -top)
    std::string provenance;
};

// r^{-h1} sum over all weightings, exactly (a rational; the division by r^h1
// is exact only in the limit sense, so the value is a Rational).
Rational weighting_sum(const StableGraph& G, const std::vector<long>& charges, long r);

GraphInvariant cg_oracle(const StableGraph& G, const EvalConfig& cfg = {});

enum class ZagierStrategy { Laurent, Division };

GraphInvariant cg_zagier(const StableGraph& G, ZagierStrategy strategy, const EvalConfig& cfg = {});

// Top-degree part: Bernoulli factor replaced by z_e/z_{e,T}.
GraphInvariant cg_top(const StableGraph& G, ZagierStrategy strategy, const EvalConfig& cfg = {});

struct SpecializationData {
    MultiPoly b;                        // variable "b" or a numeric constant
    std::vector<MultiPoly> leg_charges; // a_i for markings 1..n (index i-1)
    std::vector<Rational> delta;        // per-vertex multidegree, may be empty
    std::optional<Relation> ambient;    // normalization applied to the result

    static SpecializationData symbolic(int n);
};

// a_v -> sum_{legs at v} a_i - (2 g_v - 2 + n_v) b - delta_v; semistable
// subdivision vertices get 0.
MultiPoly specialize(const GraphInvariant& inv, const SpecializationData& spec);

// Coefficient of the (1/|Aut|)-normalized decorated stratum class in the DR
// formula: C of the graph with every edge e subdivided d_e times, specialized,
// times the per-edge series scalar (-1)^{d_e}/(d_e+1)!.
MultiPoly dr_coeff(const StableGraph& G, const std::vector<int>& edge_psi,
                   const SpecializationData& spec, ZagierStrategy strategy = ZagierStrategy::Laurent,
                   const EvalConfig& cfg = {});

// Same with the top-degree variant of the invariant on the subdivided graph.
MultiPoly dr_coeff_top(const StableGraph& G, const std::vector<int>& edge_psi,
                       const SpecializationData& spec, ZagierStrategy strategy = ZagierStrategy::Laurent,
                       const EvalConfig& cfg = {});

} // namespace drcalc
