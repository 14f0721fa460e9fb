#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace minsum {

// Uniform double in [0, 1) built from the top 53 bits of one draw.
double uniform01(std::mt19937_64& rng);

// Simple connected undirected graph on nodes 0..n-1.  Edges are stored as
// (u, v) pairs with u < v in lexicographic order; adjacency lists are sorted.
class Graph {
public:
    static Graph cycle(int n);                 // n >= 3
    static Graph complete(int n);              // n >= 2
    static Graph torus(int side, int dim);     // side >= 3, dim in {1,2,3}
    // Uniform points in the unit square, edges within the given radius.
    // Redraws until connected, at most 100 attempts.
    static Graph random_geometric(int n, double radius, std::uint64_t seed);
    static Graph from_edges(int n, std::vector<std::pair<int, int>> edges);

    int node_count() const { return n_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::vector<int>& neighbors(int v) const { return adj_[v]; }
    int degree(int v) const { return static_cast<int>(adj_[v].size()); }
    int max_degree() const { return max_degree_; }
    bool adjacent(int u, int v) const;
    int diameter() const;  // all-pairs BFS, computed once and cached

private:
    Graph(int n, std::vector<std::pair<int, int>> edges);

    int n_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> adj_;
    int max_degree_ = 0;
    mutable int diameter_ = -1;
};

// Text format: first line "n m", then one "u v" line per edge, 0-based.
Graph load_edge_list(const std::string& path);
void save_edge_list(const Graph& g, const std::string& path);

// Index over the 2m directed edges (tail, head) of a graph, sorted
// lexicographically.  Message vectors use this ordering throughout.
class DirectedEdgeIndex {
public:
    explicit DirectedEdgeIndex(const Graph& g);

    int size() const { return static_cast<int>(pairs_.size()); }
    const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
    int tail(int e) const { return pairs_[e].first; }
    int head(int e) const { return pairs_[e].second; }
    int index_of(int tail, int head) const;  // throws if no such edge
    int reverse_of(int e) const { return reverse_[e]; }

private:
    std::vector<std::pair<int, int>> pairs_;
    std::vector<int> offsets_;  // pairs_ grouped by tail
    std::vector<int> reverse_;
};

}  // namespace minsum
