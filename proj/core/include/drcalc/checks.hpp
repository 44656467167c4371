#pragma once

// Mechanical verifiers for the combinatorial identities behind the DR tables:
// scalar series identities, the per-graph top-degree correspondence and its
// inversion, the auxiliary Taylor lemma, the codim-vs-degree derivation
// identity, the global top-degree correspondence, the forgetful pushforward
// theorem, and the Q-bar congruence. All table-level checks compare FREE
// refined-stratum tables entry-wise, which is stronger than equality of cycle
// classes; failures carry the differing entry as a witness.

#include "drcalc/drtable.hpp"

#include <string>
#include <vector>

namespace drcalc {

struct CheckReport {
    std::string name;
    std::string subject;  // graph or parameter set
    bool pass = true;
    std::string witness;  // differing term/entry on failure
    std::string detail;   // sizes, orders, notes

    std::string to_string() const;
};

// Four displayed generating-function identities, exact to series order N:
//   (1) sum_d zeta(-d-1) U^d/d! = e^U/(e^U-1)^2 - 1/U^2
//   (2) [X/(e^{X+Y}-1) - X/(X+Y)]_{X^2} = -(e^Y/(e^Y-1)^2 - 1/Y^2)
//   (3) sum_d -B_{d+2} T^d/d! = -(d/dT)^2 (T/(e^T-1))
//   (4) [(X d/dX + Y d/dY) X/(e^{X+Y}-1) - X^2 (d/dY)^2 (Y/(e^Y-1))]_{X^2 Y^i} = 0
std::vector<CheckReport> check_scalar_identities(int N);

// C(G) equals the tree/subset expansion whose non-tree edges carry either the
// top factor z_e/z_{e,T} or the regularized correction -z_e^2 phi(z_{e,T}-z_e).
CheckReport check_topdeg_per_graph(const StableGraph& G,
                                   ZagierStrategy strategy = ZagierStrategy::Laurent,
                                   const EvalConfig& cfg = {});

// The sign-inverted expansion recovering the top-degree invariant from the
// full one: same machinery weighted by (-1)^{|S|}.
CheckReport check_corollary_inversion(const StableGraph& G,
                                      ZagierStrategy strategy = ZagierStrategy::Laurent,
                                      const EvalConfig& cfg = {});

// Taylor-step lemma: (a_{n+1}-b)[sum_w (2g_w-2+n_w) b P_w - sum_i a_i P_i]
// == (a_{n+1}-b)^2 (1-[deg]) C(G) modulo (a_{n+1}-b)^3 after specialization,
// where P_w shifts the charge at w by T := a_{n+1}-b.
CheckReport check_aux_lemma(const StableGraph& G,
                            ZagierStrategy strategy = ZagierStrategy::Laurent,
                            const EvalConfig& cfg = {});

// (2[codim]-[deg]) DR_g(b;a) == glue of [-(k^2/2) DR_{g-1}(b;a,k,-k)]_{k^d->B_d},
// compared entry-wise on refined tables up to codimension c_max.
CheckReport check_codim_minus_deg(int g, int n, int c_max, const EvalConfig& cfg = {});

// DR_g(b;a) == sum_m 1/(2^m m!) glue_m [prod k_i DR~_{g-m}(b;a,k_1,-k_1,...)]
// with k_i^E -> zeta(-E); includes the 2^m m! relabeling symmetry
// cross-assertion that justifies the orbit-stabilizer prefactor.
CheckReport check_topdeg_global(int g, int n, int c_max, const EvalConfig& cfg = {});

// F = pushforward of DR_g^c(b;a_1..a_{n+1}) along forgetting the last marking:
// F is divisible by (a_{n+1}-b)^2 and [F/(a_{n+1}-b)^2]_{a_{n+1}:=b} equals
// (g+1-c) DR_g^{c-1}(b;a_1..a_n), entry-wise on refined tables. For c > g the
// right side is scalar zero and the outcome is reported rather than presumed
// (free-module equality may be stronger than the cycle-class statement there).
CheckReport check_dr_push(int g, int n, int c, const EvalConfig& cfg = {});

// Q-bar congruence: Qbar(k,T,r)/r == k^2 exp((k^2/2)(psi+psi')) T mod (r, T^2),
// verified symbolically to total order `order` in psi, psi'.
CheckReport check_qbar(int order);

} // namespace drcalc
