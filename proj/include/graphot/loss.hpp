#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "graphot/graph.hpp"

namespace graphot {

// ---------------------------------------------------------------------------
// Ground losses.
//
// Both kinds are Bregman divergences and expose the factorization
//   l(a, b) = f1(a) + f2(b) - <h1(a), h2(b)>
// that the cubic-time loss evaluation relies on. The first argument is the
// target, the second the prediction. Conventions: 0 * log 0 := 0 throughout;
// the generalized KL keeps the (-a + b) terms so the divergence is valid for
// any nonnegative target and positive prediction, not just simplex points.
// ---------------------------------------------------------------------------

enum class GroundLossKind { squared_l2, kl };

struct GroundLoss {
    GroundLossKind kind = GroundLossKind::squared_l2;
    bool factorizable = true;

    static double xlogx(double x) {
        if (x < 0.0) throw std::domain_error("ground loss: negative target in KL");
        return x == 0.0 ? 0.0 : x * std::log(x);
    }

    double evaluate(const Vec& a, const Vec& b) const {
        if (a.size() != b.size()) throw std::invalid_argument("ground loss: dimension mismatch");
        if (kind == GroundLossKind::squared_l2) return (a - b).squaredNorm();
        double s = 0.0;
        for (int i = 0; i < a.size(); ++i) {
            if (b(i) < 0.0) throw std::domain_error("ground loss: negative prediction in KL");
            if (a(i) > 0.0) s += a(i) * (std::log(a(i)) - std::log(b(i)));
            else if (a(i) < 0.0) throw std::domain_error("ground loss: negative target in KL");
            s += b(i) - a(i);
        }
        return s;
    }

    // Two-class special case for scalar masks: KL embeds x as (x, 1-x),
    // squared L2 stays the plain squared difference.
    double evaluate_scalar(double a, double b) const {
        if (kind == GroundLossKind::squared_l2) return (a - b) * (a - b);
        if (a < 0.0 || a > 1.0) throw std::domain_error("ground loss: scalar KL target outside [0,1]");
        if (b < 0.0 || b > 1.0) throw std::domain_error("ground loss: scalar KL prediction outside [0,1]");
        double s = 0.0;
        if (a > 0.0) s += a * (std::log(a) - std::log(b));
        if (a < 1.0) s += (1.0 - a) * (std::log(1.0 - a) - std::log(1.0 - b));
        return s;
    }

    double f1(const Vec& a) const {
        double s = 0.0;
        for (int i = 0; i < a.size(); ++i) s += phi_f1(a(i));
        return s;
    }
    double f2(const Vec& b) const {
        double s = 0.0;
        for (int i = 0; i < b.size(); ++i) s += phi_f2(b(i));
        return s;
    }
    Vec h1(const Vec& a) const { return a.unaryExpr([this](double x) { return phi_h1(x); }); }
    Vec h2(const Vec& b) const { return b.unaryExpr([this](double x) { return phi_h2(x); }); }

    // Elementwise pieces; every sum above decomposes across channels.
    double phi_f1(double x) const { return kind == GroundLossKind::squared_l2 ? x * x : xlogx(x) - x; }
    double phi_f2(double x) const { return kind == GroundLossKind::squared_l2 ? x * x : x; }
    double phi_h1(double x) const { return kind == GroundLossKind::squared_l2 ? 2.0 * x : x; }
    double phi_h2(double x) const {
        if (kind == GroundLossKind::squared_l2) return x;
        if (x <= 0.0) throw std::domain_error("ground loss: KL prediction must be positive");
        return std::log(x);
    }
    double phi_df2(double x) const { return kind == GroundLossKind::squared_l2 ? 2.0 * x : 1.0; }
    double phi_dh2(double x) const {
        if (kind == GroundLossKind::squared_l2) return 1.0;
        if (x <= 0.0) throw std::domain_error("ground loss: KL prediction must be positive");
        return 1.0 / x;
    }

    // Derivative in the prediction argument.
    Vec grad_b(const Vec& a, const Vec& b) const {
        if (kind == GroundLossKind::squared_l2) return 2.0 * (b - a);
        Vec g(b.size());
        for (int i = 0; i < b.size(); ++i) {
            if (b(i) <= 0.0) throw std::domain_error("ground loss: KL gradient at boundary");
            g(i) = 1.0 - a(i) / b(i);
        }
        return g;
    }
    double grad_b_scalar(double a, double b) const {
        if (kind == GroundLossKind::squared_l2) return 2.0 * (b - a);
        if (b <= 0.0 || b >= 1.0) throw std::domain_error("ground loss: KL gradient at boundary");
        return (1.0 - a) / (1.0 - b) - a / b;
    }

    static GroundLoss l2() { return {GroundLossKind::squared_l2, true}; }
    static GroundLoss crossentropy() { return {GroundLossKind::kl, true}; }
};

// The five ground losses of the reconstruction loss, plus the channel split
// between the discrete (leading) and continuous (trailing) feature blocks.
// A negative split means "all channels discrete".
struct GroundLossSet {
    GroundLoss lh, lf_d, lf_c, lc_d, lc_c;
    int f_split = -1;
    int c_split = -1;

    int node_split(int d_f) const { return f_split < 0 ? d_f : std::min(f_split, d_f); }
    int edge_split(int d_c) const { return c_split < 0 ? d_c : std::min(c_split, d_c); }

    static GroundLossSet all_l2() {
        return {GroundLoss::l2(), GroundLoss::l2(), GroundLoss::l2(), GroundLoss::l2(), GroundLoss::l2(), -1, -1};
    }
    // Cross-entropy on the discrete blocks, squared L2 on the continuous.
    static GroundLossSet defaults() {
        return {GroundLoss::crossentropy(), GroundLoss::crossentropy(), GroundLoss::l2(),
                GroundLoss::crossentropy(), GroundLoss::l2(), -1, -1};
    }
};

struct LossWeights {
    double alpha_h = 1.0;
    double alpha_F_d = 1.0;
    double alpha_F_c = 1.0;
    double alpha_C_d = 1.0;
    double alpha_C_c = 1.0;

    void validate() const {
        if (alpha_h < 0 || alpha_F_d < 0 || alpha_F_c < 0 || alpha_C_d < 0 || alpha_C_c < 0)
            throw std::invalid_argument("LossWeights: weights must be nonnegative");
    }

    static LossWeights unit() { return {}; }
    static LossWeights defaults(int capacity) {
        const double n = static_cast<double>(capacity);
        return {1.0 / n, 1.0 / n, 1.0 / (2.0 * n), 1.0 / (n * n), 1.0 / (2.0 * n * n)};
    }
};

struct LossGradients {
    Vec d_h_hat;             // N
    Mat d_F_hat;             // N x d_f
    std::vector<Mat> d_C_hat;  // d_c channels of N x N
    Mat d_T;                 // N x N
};

namespace detail {

inline void check_loss_dims(const DenseGraph& g, const DenseGraph& g_hat, const TransportPlan* t) {
    if (!g.same_shape(g_hat)) throw std::invalid_argument("loss: graph shape mismatch");
    if (t && (t->rows() != g.size() || t->cols() != g.size()))
        throw std::invalid_argument("loss: transport plan shape mismatch");
}

inline double node_pair_cost(const GroundLossSet& gl, const LossWeights& w, const Vec& a, const Vec& b) {
    const int s = gl.node_split(static_cast<int>(a.size()));
    double v = 0.0;
    if (s > 0 && w.alpha_F_d != 0.0) v += w.alpha_F_d * gl.lf_d.evaluate(a.head(s), b.head(s));
    if (s < a.size() && w.alpha_F_c != 0.0) v += w.alpha_F_c * gl.lf_c.evaluate(a.tail(a.size() - s), b.tail(a.size() - s));
    return v;
}

inline double edge_pair_cost(const GroundLossSet& gl, const LossWeights& w, const Vec& a, const Vec& b) {
    const int s = gl.edge_split(static_cast<int>(a.size()));
    double v = 0.0;
    if (s > 0 && w.alpha_C_d != 0.0) v += w.alpha_C_d * gl.lc_d.evaluate(a.head(s), b.head(s));
    if (s < a.size() && w.alpha_C_c != 0.0) v += w.alpha_C_c * gl.lc_c.evaluate(a.tail(a.size() - s), b.tail(a.size() - s));
    return v;
}

// Mask and node-feature terms, shared by the naive and fast paths (the two
// paths differ only in how the quadratic edge term is evaluated). Terms with
// a zero transport coefficient are skipped so that permutation plans stay
// finite even when some ground loss value is infinite.
inline double linear_terms(const DenseGraph& g, const DenseGraph& g_hat, const TransportPlan& t,
                           const GroundLossSet& gl, const LossWeights& w) {
    const int n = g.size();
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double tij = t(i, j);
            if (tij == 0.0) continue;
            double cell = w.alpha_h * gl.lh.evaluate_scalar(g.h(i), g_hat.h(j));
            if (g.h(i) != 0.0)
                cell += g.h(i) * node_pair_cost(gl, w, g.F.row(i).transpose(), g_hat.F.row(j).transpose());
            total += cell * tij;
        }
    }
    return total;
}

}  // namespace detail

// Transport-relaxed reconstruction loss, evaluated with the direct quadruple
// loop over the edge term: O(N^4 * d_c).
inline double lot_naive(const DenseGraph& g, const DenseGraph& g_hat, const TransportPlan& t,
                        const GroundLossSet& gl, const LossWeights& w) {
    detail::check_loss_dims(g, g_hat, &t);
    w.validate();
    const int n = g.size();
    double total = detail::linear_terms(g, g_hat, t, gl, w);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            const double hik = g.h(i) * g.h(k);
            if (hik == 0.0) continue;
            const Vec cik = g.edge_vector(i, k);
            for (int j = 0; j < n; ++j) {
                if (t(i, j) == 0.0) continue;
                for (int l = 0; l < n; ++l) {
                    const double coeff = hik * t(i, j) * t(k, l);
                    if (coeff == 0.0) continue;
                    total += coeff * detail::edge_pair_cost(gl, w, cik, g_hat.edge_vector(j, l));
                }
            }
        }
    }
    return total;
}

// Same value as lot_naive, with the quadratic term expanded through the
// Bregman factorization into per-channel matrix products:
//   sum_ijkl h_i h_k l(C_ik, Chat_jl) T_ij T_kl
//     = (h.r)' F1 (h.r) + u' F2 u - sum_ch <T' (H1_ch . hh') T, H2_ch>
// with r the row sums of T and u = T'h, which is O(d_c * N^3).
inline double lot_fast(const DenseGraph& g, const DenseGraph& g_hat, const TransportPlan& t,
                       const GroundLossSet& gl, const LossWeights& w) {
    detail::check_loss_dims(g, g_hat, &t);
    w.validate();
    const int n = g.size();
    const int d_c = g.edge_dim();
    const int split = gl.edge_split(d_c);
    if (!gl.lc_d.factorizable || !gl.lc_c.factorizable)
        throw std::invalid_argument("lot_fast: edge ground loss without factorization");

    double total = detail::linear_terms(g, g_hat, t, gl, w);

    const Vec r = t.rowwise().sum();
    const Vec u = t.transpose() * g.h;
    const Vec hr = g.h.cwiseProduct(r);
    const Mat hh = g.h * g.h.transpose();

    Mat f1 = Mat::Zero(n, n), f2 = Mat::Zero(n, n);
    double cross = 0.0;
    for (int c = 0; c < d_c; ++c) {
        const GroundLoss& loss = c < split ? gl.lc_d : gl.lc_c;
        const double alpha = c < split ? w.alpha_C_d : w.alpha_C_c;
        if (alpha == 0.0) continue;
        const Mat& tc = g.C[static_cast<std::size_t>(c)];
        const Mat& pc = g_hat.C[static_cast<std::size_t>(c)];
        f1 += alpha * tc.unaryExpr([&](double x) { return loss.phi_f1(x); });
        f2 += alpha * pc.unaryExpr([&](double x) { return loss.phi_f2(x); });
        const Mat g1 = tc.unaryExpr([&](double x) { return loss.phi_h1(x); }).cwiseProduct(hh);
        const Mat h2 = pc.unaryExpr([&](double x) { return loss.phi_h2(x); });
        cross += alpha * (t.transpose() * g1 * t).cwiseProduct(h2).sum();
    }
    total += hr.dot(f1 * hr) + u.dot(f2 * u) - cross;
    return total;
}

// Exact partial derivatives of lot_naive in the prediction (h_hat, F_hat,
// C_hat) and the plan T. The quadratic pieces reuse the factorized form, so
// they cost O(d_c * N^3) like the fast loss.
inline LossGradients lot_gradients(const DenseGraph& g, const DenseGraph& g_hat, const TransportPlan& t,
                                   const GroundLossSet& gl, const LossWeights& w) {
    detail::check_loss_dims(g, g_hat, &t);
    w.validate();
    const int n = g.size();
    const int d_f = g.node_dim();
    const int d_c = g.edge_dim();
    const int fs = gl.node_split(d_f);
    const int cs = gl.edge_split(d_c);

    LossGradients out;
    out.d_h_hat = Vec::Zero(n);
    out.d_F_hat = Mat::Zero(n, d_f);
    out.d_C_hat.assign(static_cast<std::size_t>(d_c), Mat::Zero(n, n));
    out.d_T = Mat::Zero(n, n);

    // linear terms and their contribution to d_T
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double cell = w.alpha_h * gl.lh.evaluate_scalar(g.h(i), g_hat.h(j));
            out.d_h_hat(j) += w.alpha_h * gl.lh.grad_b_scalar(g.h(i), g_hat.h(j)) * t(i, j);
            if (g.h(i) != 0.0) {
                const Vec a = g.F.row(i).transpose(), b = g_hat.F.row(j).transpose();
                cell += g.h(i) * detail::node_pair_cost(gl, w, a, b);
                if (t(i, j) != 0.0) {
                    if (fs > 0)
                        out.d_F_hat.row(j).head(fs) +=
                            (g.h(i) * t(i, j) * w.alpha_F_d) * gl.lf_d.grad_b(a.head(fs), b.head(fs)).transpose();
                    if (fs < d_f)
                        out.d_F_hat.row(j).tail(d_f - fs) +=
                            (g.h(i) * t(i, j) * w.alpha_F_c) * gl.lf_c.grad_b(a.tail(d_f - fs), b.tail(d_f - fs)).transpose();
                }
            }
            out.d_T(i, j) += cell;
        }
    }

    // quadratic term
    const Vec r = t.rowwise().sum();
    const Vec u = t.transpose() * g.h;
    const Vec hr = g.h.cwiseProduct(r);
    const Mat hh = g.h * g.h.transpose();
    const Mat uu = u * u.transpose();

    Mat f1 = Mat::Zero(n, n), f2 = Mat::Zero(n, n);
    for (int c = 0; c < d_c; ++c) {
        const GroundLoss& loss = c < cs ? gl.lc_d : gl.lc_c;
        const double alpha = c < cs ? w.alpha_C_d : w.alpha_C_c;
        if (alpha == 0.0) continue;
        const Mat& tc = g.C[static_cast<std::size_t>(c)];
        const Mat& pc = g_hat.C[static_cast<std::size_t>(c)];
        f1 += alpha * tc.unaryExpr([&](double x) { return loss.phi_f1(x); });
        f2 += alpha * pc.unaryExpr([&](double x) { return loss.phi_f2(x); });

        const Mat g1 = tc.unaryExpr([&](double x) { return loss.phi_h1(x); }).cwiseProduct(hh);
        const Mat h2 = pc.unaryExpr([&](double x) { return loss.phi_h2(x); });
        out.d_T -= alpha * (g1 * t * h2.transpose() + g1.transpose() * t * h2);
        out.d_C_hat[static_cast<std::size_t>(c)] =
            alpha * (uu.cwiseProduct(pc.unaryExpr([&](double x) { return loss.phi_df2(x); })) -
                     (t.transpose() * g1 * t).cwiseProduct(pc.unaryExpr([&](double x) { return loss.phi_dh2(x); })));
    }
    const Vec a_vec = (f1 + f1.transpose()) * hr;          // d(A)/dr before the h mask
    const Vec b_vec = (f2 + f2.transpose()) * u;           // d(B)/du
    out.d_T += (g.h.cwiseProduct(a_vec)) * Vec::Ones(n).transpose();
    out.d_T += g.h * b_vec.transpose();
    return out;
}

// Elementwise aligned loss without any matching: node and edge features are
// compared slot by slot.
inline double l_align(const DenseGraph& g, const DenseGraph& g_hat, const GroundLossSet& gl, const LossWeights& w) {
    detail::check_loss_dims(g, g_hat, nullptr);
    w.validate();
    const int n = g.size();
    double total = 0.0;
    for (int i = 0; i < n; ++i)
        total += detail::node_pair_cost(gl, w, g.F.row(i).transpose(), g_hat.F.row(i).transpose());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            total += detail::edge_pair_cost(gl, w, g.edge_vector(i, j), g_hat.edge_vector(i, j));
    return total;
}

// Applies a plan to a prediction: T[G] = (T h, T F, T C T').
inline DenseGraph reorder(const DenseGraph& g_hat, const TransportPlan& t) {
    DenseGraph out;
    out.h = t * g_hat.h;
    out.F = t * g_hat.F;
    out.C.reserve(g_hat.C.size());
    for (const auto& ch : g_hat.C) out.C.push_back(t * ch * t.transpose());
    return out;
}

// Aligned loss of the target against the reordered prediction.
inline double l_pigvae(const DenseGraph& g, const DenseGraph& g_hat, const TransportPlan& t,
                       const GroundLossSet& gl, const LossWeights& w) {
    detail::check_loss_dims(g, g_hat, &t);
    return l_align(g, reorder(g_hat, t), gl, w);
}

// Entropy of the plan, column-weighted by the target mask. Entries must be
// nonnegative; zero entries contribute zero.
inline double plan_entropy_regularizer(const TransportPlan& t, const Vec& h) {
    double omega = 0.0;
    for (int i = 0; i < t.rows(); ++i) {
        for (int j = 0; j < t.cols(); ++j) {
            const double v = t(i, j);
            if (v < 0.0) throw std::domain_error("plan entropy: negative entry");
            if (v > 0.0) omega -= v * std::log(v) * h(j);
        }
    }
    return omega;
}

// Padding-aware extension of the aligned loss: the mask joins the comparison,
// node and edge terms are masked by the target h, and the entropy of the plan
// is penalized with weight lambda.
inline double pigvae_plus(const DenseGraph& g, const DenseGraph& g_hat, const TransportPlan& t,
                          const GroundLossSet& gl, const LossWeights& w, double lambda) {
    detail::check_loss_dims(g, g_hat, &t);
    w.validate();
    if (lambda < 0.0) throw std::invalid_argument("pigvae_plus: lambda must be >= 0");
    const int n = g.size();
    const DenseGraph re = reorder(g_hat, t);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        total += w.alpha_h * gl.lh.evaluate_scalar(g.h(i), re.h(i));
        if (g.h(i) != 0.0)
            total += g.h(i) * detail::node_pair_cost(gl, w, g.F.row(i).transpose(), re.F.row(i).transpose());
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (g.h(i) != 0.0 && g.h(j) != 0.0)
                total += g.h(i) * g.h(j) * detail::edge_pair_cost(gl, w, g.edge_vector(i, j), re.edge_vector(i, j));
    return total + lambda * plan_entropy_regularizer(t, g.h);
}

// Sorting-based relaxation: scores s = X U, row i is a softmax over
// -|s_i - sort(s)_j| / tau with the scores sorted in decreasing order.
// Rows sum to one; columns need not.
inline TransportPlan softsort_permuter(const Mat& x, const Vec& u, double tau) {
    if (tau <= 0.0) throw std::invalid_argument("softsort_permuter: tau must be > 0");
    if (x.cols() != u.size()) throw std::invalid_argument("softsort_permuter: dimension mismatch");
    const int n = static_cast<int>(x.rows());
    const Vec s = x * u;
    std::vector<double> sorted(s.data(), s.data() + n);
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    TransportPlan t(n, n);
    for (int i = 0; i < n; ++i) {
        Vec row(n);
        for (int j = 0; j < n; ++j) row(j) = -std::abs(s(i) - sorted[static_cast<std::size_t>(j)]) / tau;
        const double m = row.maxCoeff();
        row = (row.array() - m).exp();
        t.row(i) = row.transpose() / row.sum();
    }
    return t;
}

}  // namespace graphot
