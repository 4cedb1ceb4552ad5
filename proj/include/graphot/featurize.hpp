#pragma once

#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

#include "graphot/graph.hpp"
#include "graphot/rng.hpp"

namespace graphot {

struct FeaturizerConfig {
    int k = 2;                  // diffusion order
    int pe_dim = 16;            // sinusoidal positional-encoding width, even
    double noise_sigma = 0.01;  // stddev of the disambiguation noise on F
    std::uint64_t seed = 0;

    void validate() const {
        if (k < 0) throw std::invalid_argument("FeaturizerConfig: k must be >= 0");
        if (pe_dim < 0 || pe_dim % 2 != 0) throw std::invalid_argument("FeaturizerConfig: pe_dim must be even");
        if (noise_sigma < 0.0) throw std::invalid_argument("FeaturizerConfig: noise_sigma must be >= 0");
    }
};

// input: noisy enriched featurization at the graph's own size n.
// target: deterministic one-hot encoding padded to the full capacity.
struct FeaturizedPair {
    DenseGraph input;
    DenseGraph target;
};

// BFS hop distances; disconnected pairs get the sentinel value n, which is
// finite and strictly larger than any realizable path length.
inline Eigen::MatrixXi shortest_paths(const SparseGraph& g) {
    const int n = g.size();
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (const auto& e : g.edges) {
        adj[static_cast<std::size_t>(e.src)].push_back(e.dst);
        adj[static_cast<std::size_t>(e.dst)].push_back(e.src);
    }
    Eigen::MatrixXi sp = Eigen::MatrixXi::Constant(n, n, n);
    for (int s = 0; s < n; ++s) {
        sp(s, s) = 0;
        std::queue<int> q;
        q.push(s);
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (int v : adj[static_cast<std::size_t>(u)]) {
                if (sp(s, v) == n && v != s) {
                    sp(s, v) = sp(s, u) + 1;
                    q.push(v);
                }
            }
        }
    }
    return sp;
}

// CONCAT[F0, A F0, ..., A^k F0] where F0 is the one-hot node label matrix.
inline Mat diffusion_features(const SparseGraph& g, int k) {
    if (k < 0) throw std::invalid_argument("diffusion_features: k must be >= 0");
    const int n = g.size();
    Mat f0 = Mat::Zero(n, g.n_f);
    for (int i = 0; i < n; ++i) f0(i, g.labels[static_cast<std::size_t>(i)]) = 1.0;
    const Mat a = g.adjacency();
    Mat out(n, static_cast<Eigen::Index>(g.n_f) * (k + 1));
    Mat block = f0;
    out.leftCols(g.n_f) = block;
    for (int m = 1; m <= k; ++m) {
        block = a * block;
        out.middleCols(static_cast<Eigen::Index>(m) * g.n_f, g.n_f) = block;
    }
    return out;
}

// PE(d)_{2m} = sin(d / B^{2m/pe_dim}), PE(d)_{2m+1} = cos(.), base B = 100.
inline Vec positional_encoding(double d, int pe_dim) {
    constexpr double base = 100.0;
    Vec pe(pe_dim);
    for (int m = 0; m < pe_dim / 2; ++m) {
        const double div = std::pow(base, 2.0 * m / pe_dim);
        pe(2 * m) = std::sin(d / div);
        pe(2 * m + 1) = std::cos(d / div);
    }
    return pe;
}

// Edge channels, in order: F_i | F_j | ONE-HOT(A_ij) | PE(SP_ij) | edge-label
// one-hot (all-zero when the pair carries no edge). Width is
// 2*d_F + 2 + pe_dim + n_c.
inline std::vector<Mat> edge_features(const SparseGraph& g, const Mat& f, const FeaturizerConfig& cfg) {
    cfg.validate();
    const int n = g.size();
    const int df = static_cast<int>(f.cols());
    const int d_c = 2 * df + 2 + cfg.pe_dim + g.n_c;
    const Mat a = g.adjacency();
    const Eigen::MatrixXi sp = shortest_paths(g);
    std::vector<Mat> c(static_cast<std::size_t>(d_c), Mat::Zero(n, n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            int off = 0;
            for (int t = 0; t < df; ++t) c[static_cast<std::size_t>(off + t)](i, j) = f(i, t);
            off += df;
            for (int t = 0; t < df; ++t) c[static_cast<std::size_t>(off + t)](i, j) = f(j, t);
            off += df;
            c[static_cast<std::size_t>(off + (a(i, j) > 0.0 ? 1 : 0))](i, j) = 1.0;
            off += 2;
            const Vec pe = positional_encoding(static_cast<double>(sp(i, j)), cfg.pe_dim);
            for (int t = 0; t < cfg.pe_dim; ++t) c[static_cast<std::size_t>(off + t)](i, j) = pe(t);
            off += cfg.pe_dim;
            const int lbl = i == j ? -1 : g.edge_label(i, j);
            if (lbl >= 0) c[static_cast<std::size_t>(off + lbl)](i, j) = 1.0;
        }
    }
    return c;
}

// Deterministic enriched featurization at size n (no padding, no noise).
inline DenseGraph featurize_deterministic(const SparseGraph& g, const FeaturizerConfig& cfg) {
    cfg.validate();
    DenseGraph d;
    d.h = Vec::Ones(g.size());
    d.F = diffusion_features(g, cfg.k);
    d.C = edge_features(g, d.F, cfg);
    return d;
}

// Builds the (input, target) pair: the input is the enriched featurization
// with i.i.d. Gaussian noise added to F only, kept at the graph's own size;
// the target is the padded one-hot encoding the losses compare against.
inline FeaturizedPair featurize(const SparseGraph& g, int capacity, const FeaturizerConfig& cfg) {
    cfg.validate();
    if (g.size() > capacity) throw std::invalid_argument("featurize: graph larger than capacity");
    FeaturizedPair pair;
    pair.input = featurize_deterministic(g, cfg);
    if (cfg.noise_sigma > 0.0) {
        Rng rng(cfg.seed);
        for (int i = 0; i < pair.input.F.rows(); ++i)
            for (int j = 0; j < pair.input.F.cols(); ++j)
                pair.input.F(i, j) += rng.normal(0.0, cfg.noise_sigma);
    }
    pair.target = dense_from_sparse(g, capacity);
    return pair;
}

}  // namespace graphot
