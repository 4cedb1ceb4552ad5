#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "graphot/graph.hpp"
#include "graphot/loss.hpp"

namespace graphot {

// ---------------------------------------------------------------------------
// Sinkhorn projection onto bistochastic matrices, log domain.
// ---------------------------------------------------------------------------

struct SinkhornConfig {
    int n_iters = 100;
    double epsilon = 0.1;  // scales log K by 1/epsilon; 1 projects K itself

    void validate() const {
        if (n_iters < 1) throw std::invalid_argument("SinkhornConfig: n_iters must be >= 1");
        if (!(epsilon > 0.0)) throw std::invalid_argument("SinkhornConfig: epsilon must be > 0");
    }
};

// Forward state kept for the unrolled backward pass.
struct SinkhornTrace {
    Mat scaled_log_k;            // log(K) / epsilon
    std::vector<Vec> f_hist;     // f after each row update, f_hist[0] unused
    std::vector<Vec> g_hist;     // g after each column update, g_hist[0] = 0
    Mat plan;
    double epsilon = 1.0;
};

namespace detail {

inline Vec row_lse(const Mat& m, const Vec& add_cols) {
    const int n = static_cast<int>(m.rows());
    Vec out(n);
    for (int i = 0; i < n; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < m.cols(); ++j) mx = std::max(mx, m(i, j) + add_cols(j));
        double s = 0.0;
        for (int j = 0; j < m.cols(); ++j) s += std::exp(m(i, j) + add_cols(j) - mx);
        out(i) = mx + std::log(s);
    }
    return out;
}

inline Vec col_lse(const Mat& m, const Vec& add_rows) {
    const int n = static_cast<int>(m.cols());
    Vec out(n);
    for (int j = 0; j < n; ++j) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < m.rows(); ++i) mx = std::max(mx, m(i, j) + add_rows(i));
        double s = 0.0;
        for (int i = 0; i < m.rows(); ++i) s += std::exp(m(i, j) + add_rows(i) - mx);
        out(j) = mx + std::log(s);
    }
    return out;
}

inline Mat coupling_from(const Mat& l, const Vec& f, const Vec& g) {
    Mat t(l.rows(), l.cols());
    for (int i = 0; i < l.rows(); ++i)
        for (int j = 0; j < l.cols(); ++j) t(i, j) = std::exp(l(i, j) + f(i) + g(j));
    return t;
}

}  // namespace detail

// Alternating row/column log-sum-exp normalizations for a fixed iteration
// count on the scaled log kernel. Input must be finite.
inline SinkhornTrace sinkhorn_log_forward(const Mat& log_k, const SinkhornConfig& cfg) {
    cfg.validate();
    if (log_k.rows() != log_k.cols()) throw std::invalid_argument("sinkhorn: kernel must be square");
    if (!log_k.allFinite()) throw std::domain_error("sinkhorn: log kernel must be finite");
    const int n = static_cast<int>(log_k.rows());
    SinkhornTrace tr;
    tr.epsilon = cfg.epsilon;
    tr.scaled_log_k = log_k / cfg.epsilon;
    tr.f_hist.assign(static_cast<std::size_t>(cfg.n_iters) + 1, Vec::Zero(n));
    tr.g_hist.assign(static_cast<std::size_t>(cfg.n_iters) + 1, Vec::Zero(n));
    Vec f = Vec::Zero(n), g = Vec::Zero(n);
    for (int t = 1; t <= cfg.n_iters; ++t) {
        f = -detail::row_lse(tr.scaled_log_k, g);
        tr.f_hist[static_cast<std::size_t>(t)] = f;
        g = -detail::col_lse(tr.scaled_log_k, f);
        tr.g_hist[static_cast<std::size_t>(t)] = g;
    }
    tr.plan = detail::coupling_from(tr.scaled_log_k, f, g);
    return tr;
}

// Exact reverse-mode derivative of the unrolled iteration above, with respect
// to the unscaled log kernel.
inline Mat sinkhorn_log_backward(const SinkhornTrace& tr, const Mat& upstream) {
    const int n = static_cast<int>(tr.scaled_log_k.rows());
    if (upstream.rows() != n || upstream.cols() != n)
        throw std::invalid_argument("sinkhorn backward: upstream shape mismatch");
    const int iters = static_cast<int>(tr.f_hist.size()) - 1;

    // T = exp(L + f + g)
    const Mat dt_t = upstream.cwiseProduct(tr.plan);
    Mat dl = dt_t;
    Vec df = dt_t.rowwise().sum();
    Vec dg = dt_t.colwise().sum().transpose();

    for (int t = iters; t >= 1; --t) {
        // g_t = -col_lse(L, f_t); columns of S sum to one
        const Mat s = detail::coupling_from(tr.scaled_log_k, tr.f_hist[static_cast<std::size_t>(t)],
                                            tr.g_hist[static_cast<std::size_t>(t)]);
        dl.noalias() -= s * dg.asDiagonal();
        df.noalias() -= s * dg;
        // f_t = -row_lse(L, g_{t-1}); rows of R sum to one
        const Mat r = detail::coupling_from(tr.scaled_log_k, tr.f_hist[static_cast<std::size_t>(t)],
                                            tr.g_hist[static_cast<std::size_t>(t) - 1]);
        dl.noalias() -= df.asDiagonal() * r;
        dg.noalias() = -(r.transpose() * df);
        df.setZero();
    }
    return dl / tr.epsilon;
}

// Projects a strictly positive kernel toward the bistochastic polytope.
inline TransportPlan sinkhorn(const Mat& k, const SinkhornConfig& cfg = {}) {
    if ((k.array() <= 0.0).any() || !k.allFinite())
        throw std::domain_error("sinkhorn: kernel entries must be positive and finite");
    return sinkhorn_log_forward(k.array().log().matrix(), cfg).plan;
}

// d(loss)/dK for the same forward pass.
inline Mat sinkhorn_backward(const Mat& k, const SinkhornConfig& cfg, const Mat& upstream) {
    if ((k.array() <= 0.0).any() || !k.allFinite())
        throw std::domain_error("sinkhorn: kernel entries must be positive and finite");
    const SinkhornTrace tr = sinkhorn_log_forward(k.array().log().matrix(), cfg);
    return sinkhorn_log_backward(tr, upstream).cwiseQuotient(k);
}

// ---------------------------------------------------------------------------
// Linear assignment.
// ---------------------------------------------------------------------------

// Shortest augmenting path solver with potentials, O(N^3). Minimizes
// sum_i cost(i, perm(i)).
inline Permutation hungarian(const Mat& cost) {
    if (cost.rows() != cost.cols()) throw std::invalid_argument("hungarian: cost must be square");
    if (cost.hasNaN()) throw std::domain_error("hungarian: cost contains NaN");
    const int n = static_cast<int>(cost.rows());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0), v(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<int> p(static_cast<std::size_t>(n) + 1, 0), way(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
        std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const int i0 = p[static_cast<std::size_t>(j0)];
            int j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0);
    }
    Permutation perm;
    perm.perm.assign(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= n; ++j)
        if (p[static_cast<std::size_t>(j)]) perm.perm[static_cast<std::size_t>(p[static_cast<std::size_t>(j)]) - 1] = j - 1;
    return perm;
}

// ---------------------------------------------------------------------------
// Conditional gradient over the bistochastic polytope.
// ---------------------------------------------------------------------------

struct FWConfig {
    int max_iters = 100;
    double tol = 1e-6;  // relative objective decrease threshold

    void validate() const {
        if (max_iters < 1) throw std::invalid_argument("FWConfig: max_iters must be >= 1");
        if (!(tol > 0.0)) throw std::invalid_argument("FWConfig: tol must be > 0");
    }
};

struct FWResult {
    TransportPlan plan;
    std::vector<double> trace;  // objective after initialization and each step
};

// Minimizes the transported loss over plans: linear minimization oracle via
// the assignment solver, then exact line search on the segment (the objective
// is a quadratic in T, recovered from three evaluations). Falls back to the
// 2/(t+2) step when the segment quadratic is not convex.
inline FWResult frank_wolfe_qap(const DenseGraph& g, const DenseGraph& g_hat, const GroundLossSet& gl,
                                const LossWeights& w, const FWConfig& cfg = {}) {
    cfg.validate();
    const int n = g.size();
    FWResult res;
    res.plan = Mat::Constant(n, n, 1.0 / n);
    double value = lot_fast(g, g_hat, res.plan, gl, w);
    res.trace.push_back(value);
    for (int t = 0; t < cfg.max_iters; ++t) {
        const Mat grad = lot_gradients(g, g_hat, res.plan, gl, w).d_T;
        const TransportPlan vertex = plan_from_permutation(hungarian(grad));
        const double phi0 = value;
        const double phi1 = lot_fast(g, g_hat, vertex, gl, w);
        const double phih = lot_fast(g, g_hat, (0.5 * (res.plan + vertex)).eval(), gl, w);
        const double a = 2.0 * (phi1 + phi0 - 2.0 * phih);
        const double b = phi1 - phi0 - a;
        if (b >= 0.0) break;  // no descent along the oracle direction
        double gamma;
        if (a > 0.0)
            gamma = std::clamp(-b / (2.0 * a), 0.0, 1.0);
        else
            gamma = 2.0 / (t + 2.0);
        if (gamma == 0.0) break;
        res.plan += gamma * (vertex - res.plan);
        value = lot_fast(g, g_hat, res.plan, gl, w);
        res.trace.push_back(value);
        if (phi0 - value <= cfg.tol * (1.0 + std::abs(phi0))) break;
    }
    return res;
}

// ---------------------------------------------------------------------------
// Exhaustive permutation search.
// ---------------------------------------------------------------------------

// Exact minimizer of the transported loss over all N! permutations, ties
// resolved to the lexicographically smallest permutation. Guarded at N = 8.
inline std::pair<Permutation, double> exhaustive_min(const DenseGraph& g, const DenseGraph& g_hat,
                                                     const GroundLossSet& gl, const LossWeights& w) {
    detail::check_loss_dims(g, g_hat, nullptr);
    const int n = g.size();
    if (n > 8) throw std::invalid_argument("exhaustive_min: N must be <= 8");

    // Pairwise cost tables; the permutation value is then O(N^2) per candidate.
    Mat lin(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double cell = w.alpha_h * gl.lh.evaluate_scalar(g.h(i), g_hat.h(j));
            if (g.h(i) != 0.0)
                cell += g.h(i) * detail::node_pair_cost(gl, w, g.F.row(i).transpose(), g_hat.F.row(j).transpose());
            lin(i, j) = cell;
        }
    }
    std::vector<double> quad(static_cast<std::size_t>(n) * n * n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const double hik = g.h(i) * g.h(k);
            if (hik == 0.0) continue;
            const Vec cik = g.edge_vector(i, k);
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l)
                    quad[static_cast<std::size_t>(((i * n + k) * n + j)) * n + l] =
                        hik * detail::edge_pair_cost(gl, w, cik, g_hat.edge_vector(j, l));
        }

    std::vector<int> sigma(static_cast<std::size_t>(n));
    std::iota(sigma.begin(), sigma.end(), 0);
    Permutation best = Permutation::identity(n);
    double best_value = std::numeric_limits<double>::infinity();
    do {
        double v = 0.0;
        for (int i = 0; i < n && v < best_value; ++i) {
            v += lin(i, sigma[static_cast<std::size_t>(i)]);
            for (int k = 0; k < n; ++k)
                v += quad[static_cast<std::size_t>(((i * n + k) * n + sigma[static_cast<std::size_t>(i)])) * n +
                          sigma[static_cast<std::size_t>(k)]];
        }
        if (v < best_value) {
            best_value = v;
            best.perm = sigma;
        }
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return {best, best_value};
}

}  // namespace graphot
