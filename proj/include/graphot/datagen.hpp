#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphot/graph.hpp"
#include "graphot/rng.hpp"

namespace graphot {

enum class GenFlavor { coloring, molecule };

inline GenFlavor flavor_from_string(const std::string& s) {
    if (s == "coloring") return GenFlavor::coloring;
    if (s == "molecule") return GenFlavor::molecule;
    throw std::invalid_argument("unknown generator flavor: " + s);
}

struct GenConfig {
    int n_min = 5;
    int n_max = 12;
    std::uint64_t seed = 0;
    GenFlavor flavor = GenFlavor::coloring;
    double edge_density = 0.3;   // molecule flavor: extra edges per node
    int n_f = 4;
    int n_c = 1;
    double dominant_frac = 0.6;  // molecule flavor: frequency of label 0

    void validate() const {
        if (n_min < 1 || n_min > n_max) throw std::invalid_argument("GenConfig: need 1 <= n_min <= n_max");
        if (!(edge_density > 0.0 && edge_density <= 1.0))
            throw std::invalid_argument("GenConfig: edge_density must lie in (0,1]");
        if (n_f < 1 || n_c < 1) throw std::invalid_argument("GenConfig: alphabet sizes must be >= 1");
        if (!(dominant_frac > 0.0 && dominant_frac < 1.0))
            throw std::invalid_argument("GenConfig: dominant_frac must lie in (0,1)");
    }
};

inline bool is_connected(const SparseGraph& g) {
    const int n = g.size();
    if (n == 0) return true;
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (const auto& e : g.edges) {
        adj[static_cast<std::size_t>(e.src)].push_back(e.dst);
        adj[static_cast<std::size_t>(e.dst)].push_back(e.src);
    }
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int v : adj[static_cast<std::size_t>(u)]) {
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                ++reached;
                q.push(v);
            }
        }
    }
    return reached == n;
}

// True iff the graph is connected and no edge joins equally labelled nodes.
inline bool coloring_valid(const SparseGraph& g) {
    for (const auto& e : g.edges)
        if (g.labels[static_cast<std::size_t>(e.src)] == g.labels[static_cast<std::size_t>(e.dst)]) return false;
    return is_connected(g);
}

namespace detail {

// Geometric k-nearest-neighbour graph over random points in the unit square,
// symmetrized. Planar-like and sparse, which keeps greedy 4-colorings easy.
inline SparseGraph knn_graph(int n, int k, Rng& rng) {
    std::vector<double> px(static_cast<std::size_t>(n)), py(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        px[static_cast<std::size_t>(i)] = rng.uniform();
        py[static_cast<std::size_t>(i)] = rng.uniform();
    }
    SparseGraph g;
    g.n_f = 4;
    g.n_c = 1;
    g.labels.assign(static_cast<std::size_t>(n), 0);
    std::vector<std::vector<char>> has(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
    for (int i = 0; i < n; ++i) {
        std::vector<std::pair<double, int>> dist;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double dx = px[static_cast<std::size_t>(i)] - px[static_cast<std::size_t>(j)];
            const double dy = py[static_cast<std::size_t>(i)] - py[static_cast<std::size_t>(j)];
            dist.push_back({dx * dx + dy * dy, j});
        }
        std::sort(dist.begin(), dist.end());
        for (int t = 0; t < std::min(k, static_cast<int>(dist.size())); ++t) {
            const int j = dist[static_cast<std::size_t>(t)].second;
            const int a = std::min(i, j), b = std::max(i, j);
            if (!has[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]) {
                has[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = 1;
                g.edges.push_back({a, b, 0});
            }
        }
    }
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

// Greedy proper coloring, highest degree first; false when more than n_f
// colors would be needed.
inline bool greedy_color(SparseGraph& g) {
    const int n = g.size();
    const auto deg = g.degrees();
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return deg[static_cast<std::size_t>(x)] > deg[static_cast<std::size_t>(y)]; });
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (const auto& e : g.edges) {
        adj[static_cast<std::size_t>(e.src)].push_back(e.dst);
        adj[static_cast<std::size_t>(e.dst)].push_back(e.src);
    }
    std::vector<int> color(static_cast<std::size_t>(n), -1);
    for (int v : order) {
        bool taken[16] = {};
        for (int nb : adj[static_cast<std::size_t>(v)])
            if (color[static_cast<std::size_t>(nb)] >= 0) taken[color[static_cast<std::size_t>(nb)]] = true;
        int c = 0;
        while (c < g.n_f && taken[c]) ++c;
        if (c == g.n_f) return false;
        color[static_cast<std::size_t>(v)] = c;
    }
    g.labels = color;
    return true;
}

}  // namespace detail

// Connected graph whose labels form a proper 4-coloring: geometric 3-NN
// skeleton plus greedy coloring, resampled until both properties hold.
inline SparseGraph gen_coloring(const GenConfig& cfg, Rng& rng) {
    cfg.validate();
    const int n = rng.uniform_int(cfg.n_min, cfg.n_max);
    for (int attempt = 0; attempt < 100; ++attempt) {
        SparseGraph g = detail::knn_graph(n, 3, rng);
        if (!is_connected(g)) continue;
        if (!detail::greedy_color(g)) continue;
        g.validate();
        return g;
    }
    throw std::runtime_error("gen_coloring: no valid coloring after 100 attempts");
}

// Connected molecule-like graph: random tree plus a few extra edges, degrees
// capped at 4, one dominant node label, bond-like edge labels.
inline SparseGraph gen_molecule(const GenConfig& cfg, Rng& rng) {
    cfg.validate();
    if (cfg.n_f < 2) throw std::invalid_argument("gen_molecule: needs n_f >= 2");
    const int n = rng.uniform_int(cfg.n_min, cfg.n_max);
    SparseGraph g;
    g.n_f = cfg.n_f;
    g.n_c = cfg.n_c;
    g.labels.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        g.labels[static_cast<std::size_t>(i)] =
            rng.uniform() < cfg.dominant_frac ? 0 : rng.uniform_int(1, cfg.n_f - 1);

    auto bond = [&]() { return cfg.n_c == 1 || rng.uniform() < 0.6 ? 0 : rng.uniform_int(1, cfg.n_c - 1); };

    std::vector<int> deg(static_cast<std::size_t>(n), 0);
    std::vector<std::vector<char>> has(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
    for (int i = 1; i < n; ++i) {
        std::vector<int> candidates;
        for (int j = 0; j < i; ++j)
            if (deg[static_cast<std::size_t>(j)] < 4) candidates.push_back(j);
        // a tree node of degree < 4 always exists among 0..i-1
        const int parent = candidates[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(candidates.size()) - 1))];
        g.edges.push_back({parent, i, bond()});
        has[static_cast<std::size_t>(parent)][static_cast<std::size_t>(i)] = 1;
        ++deg[static_cast<std::size_t>(parent)];
        ++deg[static_cast<std::size_t>(i)];
    }
    const int extra = static_cast<int>(std::floor(cfg.edge_density * n));
    for (int t = 0; t < extra && n >= 2; ++t) {
        const int a = rng.uniform_int(0, n - 1), b = rng.uniform_int(0, n - 1);
        const int lo = std::min(a, b), hi = std::max(a, b);
        if (lo == hi || has[static_cast<std::size_t>(lo)][static_cast<std::size_t>(hi)]) continue;
        if (deg[static_cast<std::size_t>(lo)] >= 4 || deg[static_cast<std::size_t>(hi)] >= 4) continue;
        g.edges.push_back({lo, hi, bond()});
        has[static_cast<std::size_t>(lo)][static_cast<std::size_t>(hi)] = 1;
        ++deg[static_cast<std::size_t>(lo)];
        ++deg[static_cast<std::size_t>(hi)];
    }
    std::sort(g.edges.begin(), g.edges.end());
    g.validate();
    return g;
}

inline SparseGraph generate(const GenConfig& cfg, Rng& rng) {
    return cfg.flavor == GenFlavor::coloring ? gen_coloring(cfg, rng) : gen_molecule(cfg, rng);
}

inline std::vector<SparseGraph> generate_dataset(const GenConfig& cfg, int count) {
    Rng rng(cfg.seed);
    std::vector<SparseGraph> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(generate(cfg, rng));
    return out;
}

// Each node label is independently resampled uniformly with probability p;
// the structure is untouched.
inline SparseGraph corrupt_labels(const SparseGraph& g, double p, std::uint64_t seed) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("corrupt_labels: p must lie in [0,1]");
    Rng rng(seed);
    SparseGraph out = g;
    for (auto& lbl : out.labels)
        if (rng.uniform() < p) lbl = rng.uniform_int(0, g.n_f - 1);
    return out;
}

}  // namespace graphot
