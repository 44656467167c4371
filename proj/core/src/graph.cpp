#include "drcalc/graph.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

namespace drcalc {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
    bool unite(int a, int b) {
        a = find(a); b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};

} // namespace

int StableGraph::num_legs() const {
    int n = 0;
    for (const auto& v : vertices) n += (int)v.legs.size();
    return n;
}

int StableGraph::edge_ends(int v) const {
    int d = 0;
    for (const auto& e : edges) {
        if (e.tail == v) ++d;
        if (e.head == v) ++d;
    }
    return d;
}

int StableGraph::valence(int v) const { return edge_ends(v) + (int)vertices[v].legs.size(); }

int StableGraph::genus() const {
    int s = 0;
    for (const auto& v : vertices) s += v.genus;
    return s + h1(*this);
}

int StableGraph::leg_vertex(int marking) const {
    for (int v = 0; v < num_vertices(); ++v)
        for (int l : vertices[v].legs)
            if (l == marking) return v;
    return -1;
}

bool StableGraph::is_connected() const {
    if (vertices.empty()) return false;
    UnionFind uf(num_vertices());
    int comps = num_vertices();
    for (const auto& e : edges)
        if (uf.unite(e.tail, e.head)) --comps;
    return comps == 1;
}

void StableGraph::validate() const {
    if (vertices.empty()) throw std::invalid_argument("graph: no vertices");
    for (const auto& e : edges)
        if (e.tail < 0 || e.tail >= num_vertices() || e.head < 0 || e.head >= num_vertices())
            throw std::invalid_argument("graph: edge endpoint out of range");
    if (!is_connected()) throw std::invalid_argument("graph: not connected");
    std::set<int> seen;
    for (const auto& v : vertices) {
        if (!std::is_sorted(v.legs.begin(), v.legs.end()))
            throw std::invalid_argument("graph: legs not sorted");
        for (int l : v.legs)
            if (!seen.insert(l).second) throw std::invalid_argument("graph: duplicate marking");
    }
    int n = (int)seen.size();
    for (int l : seen)
        if (l < 1 || l > n) throw std::invalid_argument("graph: markings not 1..n");
    for (int v = 0; v < num_vertices(); ++v) {
        int g = vertices[v].genus;
        int val = valence(v);
        if (g < 0) throw std::invalid_argument("graph: negative genus");
        if (g == 0 && val < 3) {
            bool subdivision_vertex = semistable && vertices[v].legs.empty() && val == 2;
            if (!subdivision_vertex) throw std::invalid_argument("graph: unstable genus-0 vertex");
        }
        if (g == 1 && val < 1 && num_vertices() > 1)
            throw std::invalid_argument("graph: isolated genus-1 vertex");
    }
}

int h1(const StableGraph& G) {
    if (!G.is_connected()) throw std::invalid_argument("h1: disconnected graph");
    return G.num_edges() - G.num_vertices() + 1;
}

Integer kirchhoff_count(const StableGraph& G) {
    int V = G.num_vertices();
    if (V == 1) return 1;
    // Reduced Laplacian determinant, exact Gaussian elimination.
    std::vector<std::vector<Rational>> L(V - 1, std::vector<Rational>(V - 1, Rational(0)));
    for (const auto& e : G.edges) {
        if (e.tail == e.head) continue; // loops do not affect tree counts
        int u = e.tail, v = e.head;
        if (u < V - 1) L[u][u] += 1;
        if (v < V - 1) L[v][v] += 1;
        if (u < V - 1 && v < V - 1) {
            L[u][v] -= 1;
            L[v][u] -= 1;
        }
    }
    Rational det = 1;
    for (int col = 0; col < V - 1; ++col) {
        int pivot = -1;
        for (int row = col; row < V - 1; ++row)
            if (L[row][col] != 0) { pivot = row; break; }
        if (pivot < 0) return 0;
        if (pivot != col) { std::swap(L[pivot], L[col]); det = -det; }
        det *= L[col][col];
        for (int row = col + 1; row < V - 1; ++row) {
            if (L[row][col] == 0) continue;
            Rational f = L[row][col] / L[col][col];
            for (int k = col; k < V - 1; ++k) L[row][k] -= f * L[col][k];
        }
    }
    return rat_num(det) / rat_den(det);
}

std::vector<std::vector<int>> spanning_trees(const StableGraph& G) {
    int V = G.num_vertices(), E = G.num_edges();
    std::vector<std::vector<int>> trees;
    std::vector<int> pick;
    std::function<void(int)> rec = [&](int start) {
        if ((int)pick.size() == V - 1) {
            UnionFind uf(V);
            for (int e : pick)
                if (!uf.unite(G.edges[e].tail, G.edges[e].head)) return;
            trees.push_back(pick);
            return;
        }
        for (int e = start; e < E; ++e) {
            if (G.edges[e].tail == G.edges[e].head) continue;
            pick.push_back(e);
            rec(e + 1);
            pick.pop_back();
        }
    };
    rec(0);
    Integer expect = kirchhoff_count(G);
    if (Integer((long)trees.size()) != expect)
        throw std::logic_error("spanning_trees: count disagrees with matrix-tree determinant");
    return trees;
}

CycleData cycle_data(const StableGraph& G, const std::vector<int>& tree) {
    int V = G.num_vertices();
    std::set<int> in_tree(tree.begin(), tree.end());
    // adjacency over tree edges: vertex -> (neighbor, edge, +1 if traversed tail->head)
    std::vector<std::vector<std::array<int, 3>>> adj(V);
    for (int e : in_tree) {
        adj[G.edges[e].tail].push_back({G.edges[e].head, e, +1});
        adj[G.edges[e].head].push_back({G.edges[e].tail, e, -1});
    }
    // tree path from x to y as (edge, sign) steps
    auto tree_path = [&](int x, int y) {
        std::vector<int> par(V, -1), par_edge(V, -1), par_sign(V, 0);
        std::vector<int> stack{x};
        par[x] = x;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (const auto& [w, e, s] : adj[u])
                if (par[w] == -1) {
                    par[w] = u; par_edge[w] = e; par_sign[w] = s;
                    stack.push_back(w);
                }
        }
        std::vector<std::pair<int, int>> path; // traversed y..x, then reversed
        for (int u = y; u != x; u = par[u]) path.push_back({par_edge[u], par_sign[u]});
        std::reverse(path.begin(), path.end());
        return path;
    };

    CycleData cd;
    for (int e = 0; e < G.num_edges(); ++e) {
        if (in_tree.count(e)) continue;
        // fundamental cycle traversed in e's direction: e itself, then the tree
        // path from head(e) back to tail(e)
        std::map<int, int> form;
        form[e] = +1;
        for (const auto& [f, s] : tree_path(G.edges[e].head, G.edges[e].tail)) form[f] += s;
        for (auto it = form.begin(); it != form.end();)
            it = (it->second == 0) ? form.erase(it) : std::next(it);
        cd.cycle_form[e] = form;
    }
    for (int e : in_tree) {
        UnionFind uf(V);
        for (int f : in_tree)
            if (f != e) uf.unite(G.edges[f].tail, G.edges[f].head);
        std::vector<int> side;
        for (int v = 0; v < V; ++v)
            if (uf.find(v) == uf.find(G.edges[e].head)) side.push_back(v);
        cd.head_component[e] = side;
    }
    return cd;
}

StableGraph subdivide(const StableGraph& G, int e, int d) {
    if (e < 0 || e >= G.num_edges()) throw std::invalid_argument("subdivide: bad edge index");
    if (d == 0) return G;
    StableGraph H = G;
    int base = H.num_vertices();
    for (int i = 0; i < d; ++i) H.vertices.push_back({0, {}});
    int head = H.edges[e].head;
    H.edges[e].head = base;
    for (int i = 0; i + 1 < d; ++i) H.edges.push_back({base + i, base + i + 1});
    H.edges.push_back({base + d - 1, head});
    H.semistable = true;
    return H;
}

StableGraph glue_legs(const StableGraph& G, int i, int j) {
    if (i == j) throw std::invalid_argument("glue_legs: identical markings");
    int vi = G.leg_vertex(i), vj = G.leg_vertex(j);
    if (vi < 0 || vj < 0) throw std::invalid_argument("glue_legs: missing marking");
    StableGraph H = remove_leg(remove_leg(G, i), j);
    H.edges.push_back({vi, vj});
    return compact_legs(H);
}

StableGraph remove_leg(const StableGraph& G, int marking) {
    int v = G.leg_vertex(marking);
    if (v < 0) throw std::invalid_argument("remove_leg: missing marking");
    StableGraph H = G;
    auto& legs = H.vertices[v].legs;
    legs.erase(std::find(legs.begin(), legs.end(), marking));
    return H;
}

StableGraph compact_legs(const StableGraph& G) {
    std::vector<int> labels;
    for (const auto& v : G.vertices) labels.insert(labels.end(), v.legs.begin(), v.legs.end());
    std::sort(labels.begin(), labels.end());
    std::map<int, int> relabel;
    for (int k = 0; k < (int)labels.size(); ++k) relabel[labels[k]] = k + 1;
    StableGraph H = G;
    for (auto& v : H.vertices)
        for (auto& l : v.legs) l = relabel.at(l);
    return H;
}

std::vector<std::vector<int>> structure_preserving_maps(const StableGraph& A, const StableGraph& B) {
    int V = A.num_vertices();
    std::vector<std::vector<int>> maps;
    if (V != B.num_vertices() || A.num_edges() != B.num_edges()) return maps;
    if (V > 8) throw std::invalid_argument("graph symmetry search: vertex bound (8) exceeded");
    auto attrs = [](const StableGraph& G, int v) {
        return std::make_tuple(G.vertices[v].genus, G.vertices[v].legs, G.valence(v));
    };
    std::vector<int> perm(V, -1);
    std::vector<bool> used(V, false);
    std::function<void(int)> rec = [&](int v) {
        if (v == V) { maps.push_back(perm); return; }
        for (int w = 0; w < V; ++w) {
            if (used[w] || attrs(A, v) != attrs(B, w)) continue;
            perm[v] = w; used[w] = true;
            rec(v + 1);
            used[w] = false;
        }
    };
    rec(0);
    return maps;
}

long automorphism_order(const StableGraph& G, const std::vector<int>& edge_labels) {
    std::vector<int> labels = edge_labels;
    if (labels.empty()) labels.assign(G.num_edges(), 0);
    // multiplicity of each (unordered pair, label) class
    auto pair_counts = [&](const std::vector<int>& perm) {
        std::map<std::tuple<int, int, int>, int> counts;
        for (int e = 0; e < G.num_edges(); ++e) {
            int u = perm[G.edges[e].tail], v = perm[G.edges[e].head];
            counts[{std::min(u, v), std::max(u, v), labels[e]}]++;
        }
        return counts;
    };
    std::vector<int> id(G.num_vertices());
    std::iota(id.begin(), id.end(), 0);
    auto base = pair_counts(id);
    long loops = 0;
    for (const auto& e : G.edges)
        if (e.tail == e.head) ++loops;

    long total = 0;
    for (const auto& perm : structure_preserving_maps(G, G)) {
        if (pair_counts(perm) != base) continue;
        // within each (pair, label) class the parallel edges permute freely
        long ways = 1;
        for (const auto& [key, cnt] : base)
            for (int k = 2; k <= cnt; ++k) ways *= k;
        total += ways;
    }
    return total << loops;
}

std::pair<std::string, std::vector<int>> canonical_form_with_perm(const StableGraph& G,
                                                                  const std::vector<int>& edge_labels) {
    std::vector<int> labels = edge_labels;
    if (labels.empty()) labels.assign(G.num_edges(), 0);
    int V = G.num_vertices();
    if (V > 8) throw std::invalid_argument("canonical_form: vertex bound (8) exceeded");

    // All vertex orderings; encode and take the lexicographic minimum. perm[v]
    // is the new index of old vertex v.
    std::vector<int> idx(V);
    std::iota(idx.begin(), idx.end(), 0);
    std::string best;
    std::vector<int> perm(V), best_perm(V);
    do {
        for (int pos = 0; pos < V; ++pos) perm[idx[pos]] = pos;
        std::ostringstream os;
        for (int pos = 0; pos < V; ++pos) {
            const auto& vx = G.vertices[idx[pos]];
            os << "v" << vx.genus << "[";
            for (int l : vx.legs) os << l << ",";
            os << "]";
        }
        std::vector<std::tuple<int, int, int>> es;
        for (int e = 0; e < G.num_edges(); ++e) {
            int u = perm[G.edges[e].tail], v = perm[G.edges[e].head];
            es.emplace_back(std::min(u, v), std::max(u, v), labels[e]);
        }
        std::sort(es.begin(), es.end());
        for (const auto& [u, v, l] : es) os << "e" << u << "-" << v << ":" << l << ";";
        if (G.semistable) os << "S";
        std::string enc = os.str();
        if (best.empty() || enc < best) { best = enc; best_perm = perm; }
    } while (std::next_permutation(idx.begin(), idx.end()));
    return {best, best_perm};
}

std::string canonical_form(const StableGraph& G, const std::vector<int>& edge_labels) {
    return canonical_form_with_perm(G, edge_labels).first;
}

bool is_isomorphic(const StableGraph& A, const StableGraph& B) {
    if (A.num_vertices() != B.num_vertices() || A.num_edges() != B.num_edges()) return false;
    return canonical_form(A) == canonical_form(B);
}

std::vector<StableGraph> enumerate_stable_graphs(int g, int n, int max_edges) {
    if (g > 3 || n > 6 || max_edges > 6)
        throw std::invalid_argument("enumerate_stable_graphs: beyond desk-scale bounds");
    std::map<std::string, StableGraph> found;

    for (int V = 1; V <= max_edges + 1; ++V) {
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < V; ++i)
            for (int j = i; j < V; ++j) pairs.emplace_back(i, j);

        for (int E = V - 1; E <= max_edges; ++E) {
            int cycles = E - V + 1;
            if (cycles < 0 || cycles > g) continue;
            int genus_budget = g - cycles;

            // distribute E edges over vertex pairs
            std::vector<std::vector<int>> edge_dists;
            std::vector<int> counts(pairs.size(), 0);
            std::function<void(int, int)> dist = [&](int slot, int left) {
                if (slot == (int)pairs.size()) {
                    if (left == 0) edge_dists.push_back(counts);
                    return;
                }
                for (int c = 0; c <= left; ++c) {
                    counts[slot] = c;
                    dist(slot + 1, left - c);
                }
                counts[slot] = 0;
            };
            dist(0, E);

            // distribute genus_budget over V vertices
            std::vector<std::vector<int>> genus_dists;
            std::vector<int> gs(V, 0);
            std::function<void(int, int)> gdist = [&](int v, int left) {
                if (v == V - 1) {
                    gs[v] = left;
                    genus_dists.push_back(gs);
                    return;
                }
                for (int c = 0; c <= left; ++c) {
                    gs[v] = c;
                    gdist(v + 1, left - c);
                }
            };
            gdist(0, genus_budget);

            // distribute legs 1..n over V vertices
            std::vector<std::vector<int>> leg_dists;
            std::vector<int> carrier(n, 0);
            std::function<void(int)> ldist = [&](int l) {
                if (l == n) { leg_dists.push_back(carrier); return; }
                for (int v = 0; v < V; ++v) {
                    carrier[l] = v;
                    ldist(l + 1);
                }
            };
            ldist(0);

            for (const auto& ed : edge_dists) {
                StableGraph base;
                base.vertices.resize(V);
                for (size_t p = 0; p < pairs.size(); ++p)
                    for (int c = 0; c < ed[p]; ++c) base.edges.push_back({pairs[p].first, pairs[p].second});
                if (!base.is_connected()) continue;
                for (const auto& gd : genus_dists) {
                    for (const auto& ld : leg_dists) {
                        StableGraph G = base;
                        for (int v = 0; v < V; ++v) G.vertices[v].genus = gd[v];
                        for (int l = 0; l < n; ++l) G.vertices[ld[l]].legs.push_back(l + 1);
                        bool ok = true;
                        for (int v = 0; v < V && ok; ++v) {
                            int gv = G.vertices[v].genus, val = G.valence(v);
                            if (gv == 0 && val < 3) ok = false;
                            if (gv == 1 && val < 1 && V > 1) ok = false;
                        }
                        if (!ok) continue;
                        found.emplace(canonical_form(G), G);
                    }
                }
            }
        }
    }
    std::vector<StableGraph> out;
    for (auto& [key, G] : found) out.push_back(std::move(G));
    return out;
}

std::string graph_to_text(const StableGraph& G) {
    std::ostringstream os;
    os << "vertices:";
    for (const auto& v : G.vertices) {
        os << " (g=" << v.genus << " legs=";
        for (int l : v.legs) os << l << ",";
        os << ")";
    }
    os << " edges:";
    for (const auto& e : G.edges) os << " " << e.tail << "->" << e.head;
    return os.str();
}

} // namespace drcalc
