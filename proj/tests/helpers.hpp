#pragma once

#include <graphot/graphot.hpp>

namespace testutil {

using namespace graphot;

// exact (bitwise) equality for Eigen expressions
template <typename A, typename B>
bool exact_equal(const A& a, const B& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return (a.array() == b.array()).all();
}

inline bool dense_exact_equal(const DenseGraph& a, const DenseGraph& b) {
    if (!a.same_shape(b)) return false;
    if (!exact_equal(a.h, b.h) || !exact_equal(a.F, b.F)) return false;
    for (int c = 0; c < a.edge_dim(); ++c)
        if (!exact_equal(a.C[static_cast<std::size_t>(c)], b.C[static_cast<std::size_t>(c)])) return false;
    return true;
}

// Arbitrary real-valued dense graph. positive=true keeps every feature in
// [0.1, 1.1] and the mask in (0,1), which keeps KL ground losses finite.
inline DenseGraph random_dense(int n, int d_f, int d_c, Rng& rng, bool positive, int actives = -1) {
    DenseGraph g;
    g.h = Vec(n);
    if (actives >= 0) {
        for (int i = 0; i < n; ++i) g.h(i) = i < actives ? 1.0 : 0.0;
    } else {
        for (int i = 0; i < n; ++i) g.h(i) = positive ? 0.1 + 0.8 * rng.uniform() : (rng.uniform() < 0.7 ? 1.0 : 0.0);
    }
    g.F = Mat(n, d_f);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d_f; ++j) g.F(i, j) = positive ? 0.1 + rng.uniform() : rng.normal();
    g.C.assign(static_cast<std::size_t>(d_c), Mat(n, n));
    for (auto& ch : g.C)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) ch(i, j) = positive ? 0.1 + rng.uniform() : rng.normal();
    return g;
}

inline TransportPlan random_bistochastic(int n, Rng& rng) {
    Mat k(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) k(i, j) = 0.5 + rng.uniform();
    SinkhornConfig cfg;
    cfg.n_iters = 300;
    cfg.epsilon = 1.0;
    return sinkhorn(k, cfg);
}

inline SparseGraph triangle(int n_f = 1, int n_c = 1) {
    SparseGraph g;
    g.n_f = n_f;
    g.n_c = n_c;
    g.labels = {0, 0, 0};
    g.edges = {{0, 1, 0}, {0, 2, 0}, {1, 2, 0}};
    return g;
}

inline SparseGraph path3(int n_f = 1, int n_c = 1) {
    SparseGraph g;
    g.n_f = n_f;
    g.n_c = n_c;
    g.labels = {0, 0, 0};
    g.edges = {{0, 1, 0}, {1, 2, 0}};
    return g;
}

// The two-node mismatch fixture: C = Chat = 0, F = (0.5, 0.5), Fhat = (1, 0),
// full masks, uniform half plan.
struct MismatchFixture {
    DenseGraph g, g_hat;
    TransportPlan t;
};

inline MismatchFixture mismatch_fixture() {
    MismatchFixture f;
    f.g.h = Vec::Ones(2);
    f.g.F = Mat(2, 1);
    f.g.F << 0.5, 0.5;
    f.g.C.assign(1, Mat::Zero(2, 2));
    f.g_hat.h = Vec::Ones(2);
    f.g_hat.F = Mat(2, 1);
    f.g_hat.F << 1.0, 0.0;
    f.g_hat.C.assign(1, Mat::Zero(2, 2));
    f.t = Mat::Constant(2, 2, 0.5);
    return f;
}

}  // namespace testutil
