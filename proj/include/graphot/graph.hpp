#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "graphot/rng.hpp"

namespace graphot {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Sparse storage form: integer-labelled nodes and undirected labelled edges.
// ---------------------------------------------------------------------------

struct SparseGraph {
    struct Edge {
        int src = 0;
        int dst = 0;
        int label = 0;
        friend bool operator==(const Edge&, const Edge&) = default;
        friend auto operator<=>(const Edge& a, const Edge& b) {
            return std::tie(a.src, a.dst, a.label) <=> std::tie(b.src, b.dst, b.label);
        }
    };

    int n_f = 1;                    // node label alphabet size
    int n_c = 1;                    // edge label alphabet size
    std::vector<int> labels;        // labels[i] is the label of node i
    std::vector<Edge> edges;        // stored once with src < dst, no self loops

    int size() const { return static_cast<int>(labels.size()); }

    // Throws std::invalid_argument when any invariant is violated.
    void validate() const {
        if (n_f < 1 || n_c < 1) throw std::invalid_argument("SparseGraph: alphabet sizes must be >= 1");
        const int n = size();
        for (int i = 0; i < n; ++i)
            if (labels[i] < 0 || labels[i] >= n_f)
                throw std::invalid_argument("SparseGraph: node label out of range");
        std::vector<char> seen(static_cast<std::size_t>(n) * n, 0);
        for (const auto& e : edges) {
            if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n)
                throw std::invalid_argument("SparseGraph: edge endpoint out of range");
            if (e.src >= e.dst)
                throw std::invalid_argument("SparseGraph: edges must satisfy src < dst");
            if (e.label < 0 || e.label >= n_c)
                throw std::invalid_argument("SparseGraph: edge label out of range");
            char& s = seen[static_cast<std::size_t>(e.src) * n + e.dst];
            if (s) throw std::invalid_argument("SparseGraph: duplicate edge");
            s = 1;
        }
    }

    // Adjacency matrix (0/1, symmetric).
    Mat adjacency() const {
        const int n = size();
        Mat a = Mat::Zero(n, n);
        for (const auto& e : edges) {
            a(e.src, e.dst) = 1.0;
            a(e.dst, e.src) = 1.0;
        }
        return a;
    }

    std::vector<int> degrees() const {
        std::vector<int> deg(labels.size(), 0);
        for (const auto& e : edges) {
            ++deg[static_cast<std::size_t>(e.src)];
            ++deg[static_cast<std::size_t>(e.dst)];
        }
        return deg;
    }

    // -1 when no edge, else the edge label.
    int edge_label(int i, int j) const {
        if (i > j) std::swap(i, j);
        for (const auto& e : edges)
            if (e.src == i && e.dst == j) return e.label;
        return -1;
    }

    friend bool operator==(const SparseGraph&, const SparseGraph&) = default;
};

// Relabels node i as perm[i]; edges are remapped and renormalized to src < dst.
inline SparseGraph permute_sparse(const SparseGraph& g, const std::vector<int>& perm) {
    const int n = g.size();
    if (static_cast<int>(perm.size()) != n) throw std::invalid_argument("permute_sparse: size mismatch");
    SparseGraph out;
    out.n_f = g.n_f;
    out.n_c = g.n_c;
    out.labels.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.labels[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = g.labels[static_cast<std::size_t>(i)];
    out.edges.reserve(g.edges.size());
    for (const auto& e : g.edges) {
        int a = perm[static_cast<std::size_t>(e.src)], b = perm[static_cast<std::size_t>(e.dst)];
        if (a > b) std::swap(a, b);
        out.edges.push_back({a, b, e.label});
    }
    std::sort(out.edges.begin(), out.edges.end());
    return out;
}

// Normal form used by tests to compare graphs irrespective of storage order:
// nodes stably sorted by (label, degree), then the edge list sorted.
// This is not a canonization up to isomorphism.
inline SparseGraph canonical_form(const SparseGraph& g) {
    const int n = g.size();
    const auto deg = g.degrees();
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return std::tie(g.labels[static_cast<std::size_t>(a)], deg[static_cast<std::size_t>(a)]) <
               std::tie(g.labels[static_cast<std::size_t>(b)], deg[static_cast<std::size_t>(b)]);
    });
    std::vector<int> perm(static_cast<std::size_t>(n));  // old index -> new index
    for (int pos = 0; pos < n; ++pos) perm[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = pos;
    return permute_sparse(g, perm);
}

// ---------------------------------------------------------------------------
// Dense padded computational form (h, F, C).
// ---------------------------------------------------------------------------

// C is stored channel-major: C[c] is the N x N matrix of channel c, so the
// per-channel matrix products of the fast loss need no reshuffling.
struct DenseGraph {
    Vec h;                   // N, mask: 1 real node, 0 padding
    Mat F;                   // N x d_f node features
    std::vector<Mat> C;      // d_c channels of N x N edge features

    int size() const { return static_cast<int>(h.size()); }
    int node_dim() const { return static_cast<int>(F.cols()); }
    int edge_dim() const { return static_cast<int>(C.size()); }
    int active_count() const {
        int n = 0;
        for (int i = 0; i < size(); ++i)
            if (h(i) > 0.5) ++n;
        return n;
    }

    // Channel vector at edge slot (i, j).
    Vec edge_vector(int i, int j) const {
        Vec v(edge_dim());
        for (int c = 0; c < edge_dim(); ++c) v(c) = C[static_cast<std::size_t>(c)](i, j);
        return v;
    }

    bool same_shape(const DenseGraph& o) const {
        return size() == o.size() && node_dim() == o.node_dim() && edge_dim() == o.edge_dim();
    }

    // C[c] == C[c]^T for every channel.
    bool edge_channels_symmetric(double tol = 0.0) const {
        for (const auto& m : C)
            if (((m - m.transpose()).array().abs() > tol).any()) return false;
        return true;
    }
};

// ---------------------------------------------------------------------------
// Permutations and transport plans.
// ---------------------------------------------------------------------------

// perm[i] = j means slot i is sent to slot j ("old index to new index").
struct Permutation {
    std::vector<int> perm;

    int size() const { return static_cast<int>(perm.size()); }
    int operator()(int i) const { return perm[static_cast<std::size_t>(i)]; }

    void validate() const {
        const int n = size();
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        for (int v : perm) {
            if (v < 0 || v >= n) throw std::invalid_argument("Permutation: entry out of range");
            if (seen[static_cast<std::size_t>(v)]) throw std::invalid_argument("Permutation: repeated entry");
            seen[static_cast<std::size_t>(v)] = 1;
        }
    }

    Permutation inverse() const {
        Permutation inv;
        inv.perm.resize(perm.size());
        for (int i = 0; i < size(); ++i) inv.perm[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i;
        return inv;
    }

    static Permutation identity(int n) {
        Permutation p;
        p.perm.resize(static_cast<std::size_t>(n));
        std::iota(p.perm.begin(), p.perm.end(), 0);
        return p;
    }

    static Permutation random(int n, Rng& rng) {
        Permutation p = identity(n);
        rng.shuffle(p.perm);
        return p;
    }

    friend bool operator==(const Permutation&, const Permutation&) = default;
};

// N x N coupling between two graphs' node slots; entry (i, j) is the mass
// sent from node i of the first graph to node j of the second.
using TransportPlan = Mat;

inline double bistochastic_deviation(const TransportPlan& t) {
    double dev = t.minCoeff() < 0.0 ? -t.minCoeff() : 0.0;
    dev = std::max(dev, (t.rowwise().sum().array() - 1.0).abs().maxCoeff());
    dev = std::max(dev, (t.colwise().sum().array() - 1.0).abs().maxCoeff());
    return dev;
}

inline bool is_bistochastic(const TransportPlan& t, double tol = 1e-6) {
    return t.rows() == t.cols() && bistochastic_deviation(t) <= tol;
}

// Plan with unit mass at (i, perm(i)): couples slot i with its image.
inline TransportPlan plan_from_permutation(const Permutation& p) {
    const int n = p.size();
    TransportPlan t = TransportPlan::Zero(n, n);
    for (int i = 0; i < n; ++i) t(i, p(i)) = 1.0;
    return t;
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// One-hot dense encoding, padded to N slots. Node features get d_f = n_f
// channels; edge features get d_c = n_c + 1 channels where channel 0 means
// "no edge" and channel 1 + l encodes edge label l. Padding slots carry
// all-zero node rows and the "no edge" channel, so every edge vector stays a
// valid probability simplex point.
inline DenseGraph dense_from_sparse(const SparseGraph& g, int capacity) {
    g.validate();
    const int n = g.size();
    if (n > capacity) throw std::invalid_argument("dense_from_sparse: graph larger than capacity");
    DenseGraph d;
    d.h = Vec::Zero(capacity);
    d.F = Mat::Zero(capacity, g.n_f);
    d.C.assign(static_cast<std::size_t>(g.n_c) + 1, Mat::Zero(capacity, capacity));
    d.C[0].setOnes();
    for (int i = 0; i < n; ++i) {
        d.h(i) = 1.0;
        d.F(i, g.labels[static_cast<std::size_t>(i)]) = 1.0;
    }
    for (const auto& e : g.edges) {
        d.C[0](e.src, e.dst) = 0.0;
        d.C[0](e.dst, e.src) = 0.0;
        d.C[static_cast<std::size_t>(e.label) + 1](e.src, e.dst) = 1.0;
        d.C[static_cast<std::size_t>(e.label) + 1](e.dst, e.src) = 1.0;
    }
    return d;
}

// Decodes a real-valued dense graph: keep node i when h_i > threshold, label
// by argmax over F rows, keep an edge when the argmax edge channel is not
// "no edge". Ties resolve to the lowest channel index.
inline SparseGraph sparse_from_dense(const DenseGraph& d, double threshold = 0.5) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw std::invalid_argument("sparse_from_dense: threshold must lie in (0,1)");
    const int capacity = d.size();
    std::vector<int> kept;  // original slots of kept nodes, increasing
    for (int i = 0; i < capacity; ++i)
        if (d.h(i) > threshold) kept.push_back(i);

    auto argmax_first = [](const Vec& v) {
        int best = 0;
        for (int c = 1; c < v.size(); ++c)
            if (v(c) > v(best)) best = c;
        return best;
    };

    SparseGraph g;
    g.n_f = d.node_dim();
    g.n_c = std::max(1, d.edge_dim() - 1);
    g.labels.resize(kept.size());
    for (std::size_t a = 0; a < kept.size(); ++a)
        g.labels[a] = argmax_first(d.F.row(kept[a]).transpose());
    for (std::size_t a = 0; a < kept.size(); ++a) {
        for (std::size_t b = a + 1; b < kept.size(); ++b) {
            const int channel = argmax_first(d.edge_vector(kept[a], kept[b]));
            if (channel != 0)
                g.edges.push_back({static_cast<int>(a), static_cast<int>(b), channel - 1});
        }
    }
    return g;
}

// P[G] = (Ph, PF, PCP^T): slot i of the input lands at slot perm(i).
inline DenseGraph apply_permutation(const DenseGraph& g, const Permutation& p) {
    if (p.size() != g.size()) throw std::invalid_argument("apply_permutation: size mismatch");
    DenseGraph out;
    out.h = Vec::Zero(g.size());
    out.F = Mat::Zero(g.size(), g.node_dim());
    out.C.assign(static_cast<std::size_t>(g.edge_dim()), Mat::Zero(g.size(), g.size()));
    for (int i = 0; i < g.size(); ++i) {
        out.h(p(i)) = g.h(i);
        out.F.row(p(i)) = g.F.row(i);
    }
    for (int c = 0; c < g.edge_dim(); ++c)
        for (int i = 0; i < g.size(); ++i)
            for (int j = 0; j < g.size(); ++j)
                out.C[static_cast<std::size_t>(c)](p(i), p(j)) = g.C[static_cast<std::size_t>(c)](i, j);
    return out;
}

namespace detail {

inline bool dense_equal_under(const DenseGraph& a, const DenseGraph& b, const std::vector<int>& map) {
    // map[i] = slot of b matched with slot i of a; exact comparison.
    const int n = a.size();
    for (int i = 0; i < n; ++i) {
        if (a.h(i) != b.h(map[static_cast<std::size_t>(i)])) return false;
        if ((a.F.row(i).array() != b.F.row(map[static_cast<std::size_t>(i)]).array()).any()) return false;
    }
    for (int c = 0; c < a.edge_dim(); ++c)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (a.C[static_cast<std::size_t>(c)](i, j) !=
                    b.C[static_cast<std::size_t>(c)](map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)]))
                    return false;
    return true;
}

}  // namespace detail

// Exhaustive isomorphism oracle: true iff some permutation of the active
// slots (padding slots paired off in index order) makes h, F and C exactly
// equal. Guarded at 10 active nodes to keep the factorial search bounded.
inline bool is_isomorphic_bruteforce(const DenseGraph& a, const DenseGraph& b) {
    if (!a.same_shape(b)) return false;
    std::vector<int> act_a, act_b, pad_a, pad_b;
    for (int i = 0; i < a.size(); ++i) (a.h(i) > 0.5 ? act_a : pad_a).push_back(i);
    for (int i = 0; i < b.size(); ++i) (b.h(i) > 0.5 ? act_b : pad_b).push_back(i);
    if (act_a.size() > 10 || act_b.size() > 10)
        throw std::invalid_argument("is_isomorphic_bruteforce: more than 10 active nodes");
    if (act_a.size() != act_b.size()) return false;

    std::vector<int> assign(act_b.begin(), act_b.end());
    std::sort(assign.begin(), assign.end());
    std::vector<int> map(static_cast<std::size_t>(a.size()));
    do {
        for (std::size_t k = 0; k < pad_a.size(); ++k) map[static_cast<std::size_t>(pad_a[k])] = pad_b[k];
        for (std::size_t k = 0; k < act_a.size(); ++k) map[static_cast<std::size_t>(act_a[k])] = assign[k];
        if (detail::dense_equal_under(a, b, map)) return true;
    } while (std::next_permutation(assign.begin(), assign.end()));
    return false;
}

}  // namespace graphot
