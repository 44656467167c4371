#pragma once

// Stable/semistable graphs: vertices carry a genus and labeled legs (markings),
// edges are ordered pairs of vertex indices — the order is the orientation,
// which downstream invariants must not depend on. Loops and parallel edges are
// allowed. Edge list order doubles as the Laurent variable order.

#include "drcalc/multipoly.hpp"

#include <string>
#include <vector>

namespace drcalc {

struct StableGraph {
    struct Vertex {
        int genus = 0;
        std::vector<int> legs; // sorted marking labels
    };
    struct Edge {
        int tail = 0;
        int head = 0;
    };

    std::vector<Vertex> vertices;
    std::vector<Edge> edges;
    bool semistable = false; // permits genus-0 legless valence-2 vertices

    int num_vertices() const { return (int)vertices.size(); }
    int num_edges() const { return (int)edges.size(); }
    int num_legs() const;
    int valence(int v) const; // incident half-edges + legs
    int edge_ends(int v) const; // incident half-edges only (loops count twice)
    int genus() const;
    int leg_vertex(int marking) const; // -1 if absent

    bool is_connected() const;
    void validate() const; // throws std::invalid_argument on broken invariants
};

int h1(const StableGraph& G);

// All spanning trees as sorted edge-index lists; the count is asserted against
// the Kirchhoff matrix-tree determinant.
std::vector<std::vector<int>> spanning_trees(const StableGraph& G);

Integer kirchhoff_count(const StableGraph& G);

struct CycleData {
    // non-tree edge -> signed incidence over edge indices (z_{e,T}); own edge +1
    std::map<int, std::map<int, int>> cycle_form;
    // tree edge -> vertex set of the component of T minus e containing head(e)
    std::map<int, std::vector<int>> head_component;
};

CycleData cycle_data(const StableGraph& G, const std::vector<int>& tree);

// Insert d genus-0 legless vertices along edge e; orientation is inherited.
// The first segment replaces slot e in the edge list, the rest are appended.
StableGraph subdivide(const StableGraph& G, int e, int d);

// Remove legs i and j and join their carriers by a new edge (tail at i's
// carrier); remaining markings are compacted to 1..n preserving order.
StableGraph glue_legs(const StableGraph& G, int i, int j);

// Remove a leg without relabeling (pushforward plumbing).
StableGraph remove_leg(const StableGraph& G, int marking);

// Compact marking labels to 1..n preserving order.
StableGraph compact_legs(const StableGraph& G);

// |Aut(G)|, optionally refusing automorphisms that break a per-edge decoration.
long automorphism_order(const StableGraph& G, const std::vector<int>& edge_labels = {});

// Canonical encodings: equal strings iff isomorphic (exhaustive minimization).
// The decorated variant carries per-edge labels that automorphisms must respect.
std::string canonical_form(const StableGraph& G, const std::vector<int>& edge_labels = {});
// Also returns the relabeling that realizes the canonical encoding:
// perm[v] = canonical index of vertex v.
std::pair<std::string, std::vector<int>> canonical_form_with_perm(const StableGraph& G,
                                                                  const std::vector<int>& edge_labels = {});
bool is_isomorphic(const StableGraph& A, const StableGraph& B);

// Vertex permutations compatible with (genus, leg set) classes — the candidate
// pool for automorphism/canonicalization searches.
std::vector<std::vector<int>> structure_preserving_maps(const StableGraph& A, const StableGraph& B);

std::vector<StableGraph> enumerate_stable_graphs(int g, int n, int max_edges);

std::string graph_to_text(const StableGraph& G);

} // namespace drcalc
