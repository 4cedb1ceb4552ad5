#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphot/editdist.hpp"
#include "graphot/featurize.hpp"
#include "graphot/graph.hpp"
#include "graphot/loss.hpp"
#include "graphot/rng.hpp"
#include "graphot/solvers.hpp"

namespace graphot {

// ---------------------------------------------------------------------------
// Affinity model: two independent one-hidden-layer perceptrons embedding the
// two graphs' nodes, plus a learnable embedding for padding slots.
// ---------------------------------------------------------------------------

struct Mlp {
    Mat w1;  // d_in x hidden
    Vec b1;  // hidden
    Mat w2;  // hidden x d_out
    Vec b2;  // d_out

    int input_dim() const { return static_cast<int>(w1.rows()); }
    int hidden_dim() const { return static_cast<int>(w1.cols()); }
    int output_dim() const { return static_cast<int>(w2.cols()); }

    // ReLU hidden activation; subgradient at 0 taken as 0.
    Vec forward(const Vec& x) const { return w2.transpose() * hidden(x) + b2; }
    Vec hidden(const Vec& x) const { return (w1.transpose() * x + b1).cwiseMax(0.0); }
};

struct MlpGrads {
    Mat w1;
    Vec b1;
    Mat w2;
    Vec b2;

    static MlpGrads zeros_like(const Mlp& m) {
        return {Mat::Zero(m.w1.rows(), m.w1.cols()), Vec::Zero(m.b1.size()), Mat::Zero(m.w2.rows(), m.w2.cols()),
                Vec::Zero(m.b2.size())};
    }
    void accumulate(const MlpGrads& o) { w1 += o.w1; b1 += o.b1; w2 += o.w2; b2 += o.b2; }
};

struct AffinityModel {
    Mlp mlp_in;
    Mlp mlp_out;
    Vec u;  // padding embedding, input space

    int input_dim() const { return mlp_in.input_dim(); }

    void validate() const {
        if (!mlp_in.w1.allFinite() || !mlp_in.w2.allFinite() || !mlp_out.w1.allFinite() || !mlp_out.w2.allFinite() ||
            !mlp_in.b1.allFinite() || !mlp_in.b2.allFinite() || !mlp_out.b1.allFinite() || !mlp_out.b2.allFinite() ||
            !u.allFinite())
            throw std::invalid_argument("AffinityModel: non-finite weights");
    }
};

namespace detail {

inline Mat glorot(int rows, int cols, Rng& rng) {
    const double bound = std::sqrt(6.0 / (rows + cols));
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = (2.0 * rng.uniform() - 1.0) * bound;
    return m;
}

inline Mlp init_mlp(int d_in, int hidden, int d_out, Rng& rng) {
    return {glorot(d_in, hidden, rng), Vec::Zero(hidden), glorot(hidden, d_out, rng), Vec::Zero(d_out)};
}

}  // namespace detail

// The two maps are independent parameters but share the initial draw, so the
// affinity starts out consistent: identical inputs begin as nearest
// neighbours and training only has to refine that.
inline AffinityModel init_affinity_model(int d_in, int hidden, int d_embed, std::uint64_t seed) {
    Rng rng(seed);
    AffinityModel m;
    m.mlp_in = detail::init_mlp(d_in, hidden, d_embed, rng);
    m.mlp_out = m.mlp_in;
    m.u = Vec(d_in);
    for (int i = 0; i < d_in; ++i) m.u(i) = rng.uniform() - 0.5;
    return m;
}

// Everything the backward pass needs from one affinity evaluation.
struct AffinityForward {
    Mat emb_in;    // N x d_e, rows a_i = mlp_in(X_i)
    Mat emb_out;   // N x d_e, rows b_j = mlp_out(Xhat_j)
    Mat pre_in;    // N x H pre-activations of mlp_in
    Mat pre_out;   // N x H
    Mat cost;      // cost(i,j) = |a_i - b_j|_1, so the affinity is exp(-cost)
};

inline AffinityForward affinity_forward(const AffinityModel& m, const Mat& x, const Mat& x_hat) {
    if (x.cols() != m.input_dim() || x_hat.cols() != m.mlp_out.input_dim())
        throw std::invalid_argument("affinity: embedding dimension mismatch");
    const int n = static_cast<int>(x.rows());
    const int n2 = static_cast<int>(x_hat.rows());
    AffinityForward f;
    f.pre_in = (x * m.mlp_in.w1).rowwise() + m.mlp_in.b1.transpose();
    f.pre_out = (x_hat * m.mlp_out.w1).rowwise() + m.mlp_out.b1.transpose();
    f.emb_in = (f.pre_in.cwiseMax(0.0) * m.mlp_in.w2).rowwise() + m.mlp_in.b2.transpose();
    f.emb_out = (f.pre_out.cwiseMax(0.0) * m.mlp_out.w2).rowwise() + m.mlp_out.b2.transpose();
    f.cost = Mat(n, n2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n2; ++j) f.cost(i, j) = (f.emb_in.row(i) - f.emb_out.row(j)).cwiseAbs().sum();
    return f;
}

// K(i,j) = exp(-|MLP_in(X_i) - MLP_out(Xhat_j)|_1); entries lie in (0, 1].
inline Mat affinity(const AffinityModel& m, const Mat& x, const Mat& x_hat) {
    return (-affinity_forward(m, x, x_hat).cost).array().exp();
}

struct AffinityGrads {
    MlpGrads in;
    MlpGrads out;
    Vec du;
};

// Reverse pass through the affinity given d(loss)/d(cost). Rows at index
// n_active and beyond were fed the padding embedding u, so their input
// gradients flow into du. sign(0) := 0 for the L1 kink.
inline AffinityGrads affinity_backward(const AffinityModel& m, const Mat& x, const Mat& x_hat,
                                       const AffinityForward& f, const Mat& d_cost, int n_active_in,
                                       int n_active_out) {
    const int n = static_cast<int>(x.rows());
    const int n2 = static_cast<int>(x_hat.rows());
    Mat d_a = Mat::Zero(n, f.emb_in.cols());
    Mat d_b = Mat::Zero(n2, f.emb_out.cols());
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n2; ++j) {
            const double g = d_cost(i, j);
            if (g == 0.0) continue;
            const Eigen::RowVectorXd sgn =
                (f.emb_in.row(i) - f.emb_out.row(j)).unaryExpr([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
            d_a.row(i) += g * sgn;
            d_b.row(j) -= g * sgn;
        }
    }
    AffinityGrads out;
    out.in = MlpGrads::zeros_like(m.mlp_in);
    out.out = MlpGrads::zeros_like(m.mlp_out);
    out.du = Vec::Zero(m.u.size());

    auto back_mlp = [](const Mlp& mlp, const Mat& input, const Mat& pre, const Mat& d_y, MlpGrads& grads,
                       Vec& du, int n_active) {
        const Mat hidden = pre.cwiseMax(0.0);
        grads.w2 += hidden.transpose() * d_y;
        grads.b2 += d_y.colwise().sum().transpose();
        Mat d_hidden = d_y * mlp.w2.transpose();
        for (int i = 0; i < pre.rows(); ++i)
            for (int h = 0; h < pre.cols(); ++h)
                if (pre(i, h) <= 0.0) d_hidden(i, h) = 0.0;
        grads.w1 += input.transpose() * d_hidden;
        grads.b1 += d_hidden.colwise().sum().transpose();
        const Mat d_input = d_hidden * mlp.w1.transpose();
        for (int i = n_active; i < input.rows(); ++i) du += d_input.row(i).transpose();
    };
    back_mlp(m.mlp_in, x, f.pre_in, d_a, out.in, out.du, n_active_in);
    back_mlp(m.mlp_out, x_hat, f.pre_out, d_b, out.out, out.du, n_active_out);
    return out;
}

// ---------------------------------------------------------------------------
// Matching.
// ---------------------------------------------------------------------------

enum class MatchMode { train, test };

// Train mode runs the differentiable bistochastic projection of the affinity;
// test mode solves the assignment exactly and returns a permutation matrix.
// The projection works on log K = -cost directly so huge costs cannot
// underflow.
inline TransportPlan match(const AffinityModel& m, const Mat& x, const Mat& x_hat, MatchMode mode,
                           const SinkhornConfig& cfg = {}) {
    const AffinityForward f = affinity_forward(m, x, x_hat);
    if (mode == MatchMode::train) return sinkhorn_log_forward(-f.cost, cfg).plan;
    return plan_from_permutation(hungarian(f.cost));
}

// Node embedding hook: maps a padded dense graph to one embedding row per
// active slot (in slot order).
using NodeEmbedding = std::function<Mat(const DenseGraph&)>;

// Deterministic featurizer embedding, the stand-in for learned encoder
// embeddings: decode the padded graph and run the noise-free featurizer.
inline NodeEmbedding featurizer_embedding(const FeaturizerConfig& cfg) {
    FeaturizerConfig clean = cfg;
    clean.noise_sigma = 0.0;
    return [clean](const DenseGraph& g) {
        return featurize_deterministic(sparse_from_dense(g, 0.5), clean).F;
    };
}

// Active rows in slot order, padding slots filled with u.
inline Mat pad_embedding(const Mat& rows, const Vec& u, const DenseGraph& g) {
    Mat out(g.size(), u.size());
    int next = 0;
    for (int i = 0; i < g.size(); ++i) {
        if (g.h(i) > 0.5)
            out.row(i) = rows.row(next++);
        else
            out.row(i) = u.transpose();
    }
    return out;
}

struct MatchGraphsResult {
    Permutation permutation;
    int edit_upper_bound = 0;
};

// Matches two padded graphs in test mode and reports the alignment cost of
// the resulting permutation, an upper bound of the edit distance.
inline MatchGraphsResult match_graphs(const AffinityModel& m, const DenseGraph& g1, const DenseGraph& g2,
                                      const NodeEmbedding& embed) {
    if (g1.size() != g2.size()) throw std::invalid_argument("match_graphs: graphs must share the padded size");
    const Mat x1 = pad_embedding(embed(g1), m.u, g1);
    const Mat x2 = pad_embedding(embed(g2), m.u, g2);
    const AffinityForward f = affinity_forward(m, x1, x2);
    const Permutation p = hungarian(f.cost);
    const SparseGraph s1 = sparse_from_dense(g1, 0.5);
    const SparseGraph s2 = sparse_from_dense(g2, 0.5);
    return {p, align_cost(s1, s2, p)};
}

// ---------------------------------------------------------------------------
// Training.
// ---------------------------------------------------------------------------

struct TrainConfig {
    double lr = 1e-3;
    int steps = 500;
    int batch = 8;
    std::uint64_t seed = 0;
    SinkhornConfig sinkhorn;

    void validate() const {
        if (!(lr > 0.0)) throw std::invalid_argument("TrainConfig: lr must be > 0");
        if (steps < 1 || batch < 1) throw std::invalid_argument("TrainConfig: steps and batch must be >= 1");
        sinkhorn.validate();
    }
};

struct TrainResult {
    AffinityModel model;
    std::vector<double> trace;  // batch-mean loss per step
};

namespace detail {

struct TrainExample {
    DenseGraph target;  // padded one-hot graph, both loss arguments
    Mat observation;    // the noisy featurized node rows, unpadded
    int n_active = 0;
};

}  // namespace detail

// Gradient descent on the matcher parameters of the transported loss
// L(G*, G*, T(X, X*)). Both embedding arguments come from the same noisy
// observation of the graph (one featurizer pass feeds both sides, the way
// one forward pass feeds both matcher inputs in the full autoencoder), so the
// loss is driven to zero exactly when the matcher resolves every node of the
// observation, disambiguation noise included. Backward chain: loss -> plan
// (unrolled projection) -> affinity -> weights.
inline TrainResult train_matcher(const AffinityModel& model, const std::vector<FeaturizedPair>& dataset,
                                 const TrainConfig& cfg) {
    cfg.validate();
    model.validate();
    if (dataset.empty()) throw std::invalid_argument("train_matcher: empty dataset");

    TrainResult res;
    res.model = model;
    const GroundLossSet gl = GroundLossSet::all_l2();

    std::vector<detail::TrainExample> examples;
    examples.reserve(dataset.size());
    for (const auto& pair : dataset) {
        detail::TrainExample ex;
        ex.target = pair.target;
        ex.n_active = pair.target.active_count();
        if (pair.input.size() != ex.n_active)
            throw std::invalid_argument("train_matcher: input/target node count mismatch");
        ex.observation = pair.input.F;
        examples.push_back(std::move(ex));
    }

    Rng rng(cfg.seed);
    for (int step = 0; step < cfg.steps; ++step) {
        MlpGrads g_in = MlpGrads::zeros_like(res.model.mlp_in);
        MlpGrads g_out = MlpGrads::zeros_like(res.model.mlp_out);
        Vec g_u = Vec::Zero(res.model.u.size());
        double loss_sum = 0.0;

        for (int b = 0; b < cfg.batch; ++b) {
            const auto& ex = examples[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(examples.size()) - 1))];
            const Mat x = pad_embedding(ex.observation, res.model.u, ex.target);

            const LossWeights w = LossWeights::defaults(ex.target.size());
            const AffinityForward f = affinity_forward(res.model, x, x);
            if (!f.cost.allFinite())
                throw std::runtime_error("train_matcher: non-finite affinity at step " + std::to_string(step));
            const SinkhornTrace tr = sinkhorn_log_forward(-f.cost, cfg.sinkhorn);
            const double loss = lot_fast(ex.target, ex.target, tr.plan, gl, w);
            if (!std::isfinite(loss))
                throw std::runtime_error("train_matcher: loss diverged at step " + std::to_string(step));
            loss_sum += loss;

            const Mat d_t = lot_gradients(ex.target, ex.target, tr.plan, gl, w).d_T;
            const Mat d_cost = -sinkhorn_log_backward(tr, d_t);
            const AffinityGrads ag = affinity_backward(res.model, x, x, f, d_cost, ex.n_active, ex.n_active);
            g_in.accumulate(ag.in);
            g_out.accumulate(ag.out);
            g_u += ag.du;
        }

        const double scale = cfg.lr / cfg.batch;
        res.model.mlp_in.w1 -= scale * g_in.w1;
        res.model.mlp_in.b1 -= scale * g_in.b1;
        res.model.mlp_in.w2 -= scale * g_in.w2;
        res.model.mlp_in.b2 -= scale * g_in.b2;
        res.model.mlp_out.w1 -= scale * g_out.w1;
        res.model.mlp_out.b1 -= scale * g_out.b1;
        res.model.mlp_out.w2 -= scale * g_out.w2;
        res.model.mlp_out.b2 -= scale * g_out.b2;
        res.model.u -= scale * g_u;
        res.trace.push_back(loss_sum / cfg.batch);
    }
    return res;
}

}  // namespace graphot
