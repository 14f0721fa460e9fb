#include "minsum/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "minsum/errors.hpp"

namespace minsum {

namespace {

std::pair<int, int> ordered(int u, int v) {
    return u < v ? std::make_pair(u, v) : std::make_pair(v, u);
}

// Distances from src by breadth-first search; -1 for unreachable nodes.
std::vector<int> bfs_distances(const std::vector<std::vector<int>>& adj, int src) {
    std::vector<int> dist(adj.size(), -1);
    std::queue<int> q;
    dist[src] = 0;
    q.push(src);
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int w : adj[v]) {
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                q.push(w);
            }
        }
    }
    return dist;
}

}  // namespace

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Graph::Graph(int n, std::vector<std::pair<int, int>> edges) : n_(n) {
    if (n < 2) throw std::invalid_argument("graph needs at least 2 nodes");
    for (auto& [u, v] : edges) {
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw std::invalid_argument("edge endpoint out of range");
        if (u == v) throw std::invalid_argument("self loops are not allowed");
        std::tie(u, v) = ordered(u, v);
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
        throw std::invalid_argument("duplicate edge");
    edges_ = std::move(edges);

    adj_.resize(n_);
    for (auto [u, v] : edges_) {
        adj_[u].push_back(v);
        adj_[v].push_back(u);
    }
    for (auto& nb : adj_) {
        std::sort(nb.begin(), nb.end());
        max_degree_ = std::max(max_degree_, static_cast<int>(nb.size()));
    }

    auto dist = bfs_distances(adj_, 0);
    if (std::find(dist.begin(), dist.end(), -1) != dist.end())
        throw std::invalid_argument("graph is not connected");
}

Graph Graph::cycle(int n) {
    if (n < 3) throw std::invalid_argument("cycle needs n >= 3");
    std::vector<std::pair<int, int>> edges;
    edges.reserve(n);
    for (int i = 0; i < n; ++i) edges.push_back(ordered(i, (i + 1) % n));
    return Graph(n, std::move(edges));
}

Graph Graph::complete(int n) {
    if (n < 2) throw std::invalid_argument("complete graph needs n >= 2");
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) edges.emplace_back(u, v);
    return Graph(n, std::move(edges));
}

Graph Graph::torus(int side, int dim) {
    if (side < 3) throw std::invalid_argument("torus needs side >= 3");
    if (dim < 1 || dim > 3) throw std::invalid_argument("torus dimension must be 1, 2 or 3");
    int n = 1;
    for (int d = 0; d < dim; ++d) n *= side;
    // Node id is a mixed-radix encoding of its coordinates, digit d has
    // stride side^d.  Wrap-around neighbor along each axis.
    std::set<std::pair<int, int>> edges;
    for (int v = 0; v < n; ++v) {
        int stride = 1;
        for (int d = 0; d < dim; ++d) {
            int coord = (v / stride) % side;
            int up = v + ((coord + 1) % side - coord) * stride;
            edges.insert(ordered(v, up));
            stride *= side;
        }
    }
    return Graph(n, std::vector<std::pair<int, int>>(edges.begin(), edges.end()));
}

Graph Graph::random_geometric(int n, double radius, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("random geometric graph needs n >= 2");
    if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
    std::mt19937_64 rng(seed);
    const int max_attempts = 100;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        std::vector<double> x(n), y(n);
        for (int i = 0; i < n; ++i) {
            x[i] = uniform01(rng);
            y[i] = uniform01(rng);
        }
        std::vector<std::pair<int, int>> edges;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v) {
                double dx = x[u] - x[v], dy = y[u] - y[v];
                if (dx * dx + dy * dy <= radius * radius) edges.emplace_back(u, v);
            }
        // Connectivity check on the candidate before committing to it.
        std::vector<std::vector<int>> adj(n);
        for (auto [u, v] : edges) {
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
        auto dist = bfs_distances(adj, 0);
        if (std::find(dist.begin(), dist.end(), -1) == dist.end())
            return Graph(n, std::move(edges));
    }
    throw NumericalError("no connected geometric graph after " +
                         std::to_string(max_attempts) + " attempts; increase the radius");
}

Graph Graph::from_edges(int n, std::vector<std::pair<int, int>> edges) {
    return Graph(n, std::move(edges));
}

bool Graph::adjacent(int u, int v) const {
    if (u < 0 || u >= n_ || v < 0 || v >= n_) return false;
    const auto& nb = adj_[u];
    return std::binary_search(nb.begin(), nb.end(), v);
}

int Graph::diameter() const {
    if (diameter_ < 0) {
        int d = 0;
        for (int v = 0; v < n_; ++v) {
            auto dist = bfs_distances(adj_, v);
            d = std::max(d, *std::max_element(dist.begin(), dist.end()));
        }
        diameter_ = d;
    }
    return diameter_;
}

Graph load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open graph file: " + path);
    int n = 0, m = 0;
    if (!(in >> n >> m)) throw std::invalid_argument("bad header in graph file: " + path);
    std::vector<std::pair<int, int>> edges;
    edges.reserve(m);
    for (int i = 0; i < m; ++i) {
        int u, v;
        if (!(in >> u >> v))
            throw std::invalid_argument("truncated edge list in graph file: " + path);
        edges.emplace_back(u, v);
    }
    return Graph::from_edges(n, std::move(edges));
}

void save_edge_list(const Graph& g, const std::string& path) {
    std::ostringstream out;
    out << g.node_count() << " " << g.edge_count() << "\n";
    for (auto [u, v] : g.edges()) out << u << " " << v << "\n";
    std::ofstream f(path);
    if (!f) throw std::invalid_argument("cannot write graph file: " + path);
    f << out.str();
}

DirectedEdgeIndex::DirectedEdgeIndex(const Graph& g) {
    int n = g.node_count();
    pairs_.reserve(2 * g.edge_count());
    offsets_.assign(n + 1, 0);
    for (int v = 0; v < n; ++v) {
        for (int w : g.neighbors(v)) pairs_.emplace_back(v, w);
        offsets_[v + 1] = static_cast<int>(pairs_.size());
    }
    reverse_.resize(pairs_.size());
    for (int e = 0; e < size(); ++e) reverse_[e] = index_of(pairs_[e].second, pairs_[e].first);
}

int DirectedEdgeIndex::index_of(int tail, int head) const {
    if (tail < 0 || tail + 1 >= static_cast<int>(offsets_.size()))
        throw std::invalid_argument("directed edge tail out of range");
    auto begin = pairs_.begin() + offsets_[tail];
    auto end = pairs_.begin() + offsets_[tail + 1];
    auto it = std::lower_bound(begin, end, std::make_pair(tail, head));
    if (it == end || it->second != head)
        throw std::invalid_argument("no directed edge " + std::to_string(tail) + "->" +
                                    std::to_string(head));
    return static_cast<int>(it - pairs_.begin());
}

}  // namespace minsum
