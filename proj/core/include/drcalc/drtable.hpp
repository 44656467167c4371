#pragma once

// DR coefficient tables: the DR cycle expanded over the FREE module on
// decorated boundary strata (stable graph + edge-psi insertions + a divisor
// monomial in kappa_1 and marking psi classes). No tautological relations are
// imposed, so equality of tables is stronger than equality of cycle classes.
//
// Two bases are used. The coarse basis decorates each edge with a power of
// (psi + psi') symmetrically; it is what the DR formula produces directly. The
// refined basis decorates half-edges, legs, and vertices separately; it is
// closed under the gluing and forgetful-pushforward operations the theorem
// checks need, and every coarse table embeds into it by expansion.

#include "drcalc/invariant.hpp"

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace drcalc {

struct DivisorMonomial {
    int kappa1 = 0;              // exponent of ambient kappa_1
    std::map<int, int> leg_psi;  // marking -> psi exponent (> 0 entries only)

    int codim() const {
        int c = kappa1;
        for (const auto& [i, p] : leg_psi) c += p;
        return c;
    }
    std::string key() const;
    bool operator<(const DivisorMonomial& o) const {
        return std::tie(kappa1, leg_psi) < std::tie(o.kappa1, o.leg_psi);
    }
};

struct DecoratedStratum {
    StableGraph graph;
    std::vector<int> edge_psi;  // exponent of (psi+psi') per edge
    DivisorMonomial divisor;

    int codim() const {
        int c = graph.num_edges() + divisor.codim();
        for (int d : edge_psi) c += d;
        return c;
    }
    // Canonical under graph isomorphisms respecting the edge decorations.
    std::string key() const;
};

enum class TableFlavor { Full, Top };

struct DRTable {
    int g = 0, n = 0, c_max = 0;
    TableFlavor flavor = TableFlavor::Full;
    // canonical stratum key -> (representative, coefficient in b, a_2..a_n)
    std::map<std::string, std::pair<DecoratedStratum, MultiPoly>> entries;

    void add(const DecoratedStratum& s, const MultiPoly& value);
};

// Normalization sum a_i = (2g-2+n) b: eliminates a1 for n >= 1, b for n = 0.
Relation ambient_relation(int g, int n);

// Symbolic charges b, a_1..a_n with the ambient relation attached.
SpecializationData table_charges(int g, int n);

// The DR (flavor Full) or top-degree DR~ (flavor Top) coefficient table up to
// codimension c_max. The general form takes explicit leg charges (used by the
// theorem checks, where extra markings carry symbolic k charges).
DRTable assemble_dr(int g, int n, int c_max, TableFlavor flavor = TableFlavor::Full,
                    ZagierStrategy strategy = ZagierStrategy::Laurent, const EvalConfig& cfg = {});
DRTable assemble_dr_with_charges(int g, int n_markings, int c_max, TableFlavor flavor,
                                 const SpecializationData& spec,
                                 ZagierStrategy strategy = ZagierStrategy::Laurent,
                                 const EvalConfig& cfg = {});

// Per-stratum coefficient of a monomial in b, a_2..a_n within codimension c.
// Throws std::invalid_argument if the monomial mentions a1 or c > c_max.
std::map<std::string, std::pair<DecoratedStratum, Rational>>
extract_coefficient(const DRTable& table, const Monomial& monomial, int c);

// ---------------------------------------------------------------------------
// Refined basis

struct RefinedStratum {
    StableGraph graph;
    std::vector<std::array<int, 2>> half_psi;  // per edge: {tail exp, head exp}
    std::map<int, int> leg_psi;                // marking -> psi exponent
    std::vector<int> kappa1;                   // per vertex

    int codim() const;
    // Canonical under isomorphisms; edge orientation is not structure.
    std::string key() const;
};

struct RefinedTable {
    int g = 0, n = 0;
    std::map<std::string, std::pair<RefinedStratum, MultiPoly>> entries;

    void add(const RefinedStratum& s, const MultiPoly& value);
    void add_scaled(const RefinedTable& o, const Rational& c);
};

// Expand a coarse table: (psi+psi')^d binomially per edge, kappa_1^j into
// per-vertex placements, ambient psi_i onto the leg's carrier.
RefinedTable refine(const DRTable& table);

// Entry-wise transform of the coefficient polynomials.
RefinedTable map_values(const RefinedTable& t, const std::function<MultiPoly(const MultiPoly&)>& f);

// Glue legs i and j of every stratum into a node (leg-psi exponents become the
// new edge's half-edge exponents); remaining markings are compacted.
RefinedTable glue_refined(const RefinedTable& t, int i, int j);

// Pushforward along forgetting the last marking, by the case analysis on the
// carrier vertex: psi_{n+1}^s -> kappa_{s-1} (kappa_0 is the scalar
// 2g_w-2+n_w), the signless string equation for s = 0, genus-0 bubbles popped
// into a leg or a merged edge. Throws if a kappa class beyond kappa_1 would be
// required. charge_values, if nonempty, is substituted into entry values
// first (e.g. numeric charges satisfying the (g, n+1) relation).
RefinedTable forget_pushforward(const DRTable& table,
                                const std::map<std::string, MultiPoly>& charge_values = {});
RefinedTable forget_pushforward(const RefinedTable& t);

} // namespace drcalc
