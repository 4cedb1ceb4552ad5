#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"

using namespace graphot;
using testutil::exact_equal;

namespace {

Mat random_rows(int n, int d, Rng& rng) {
    Mat x(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) x(i, j) = rng.normal();
    return x;
}

}  // namespace

TEST_CASE("affinity matrix") {
    SECTION("tied maps and tied inputs give unit diagonal") {
        AffinityModel m = init_affinity_model(5, 8, 4, 1);
        m.mlp_out = m.mlp_in;
        Rng rng(2);
        const Mat x = random_rows(4, 5, rng);
        const Mat k = affinity(m, x, x);
        for (int i = 0; i < 4; ++i) REQUIRE(k(i, i) == 1.0);
    }
    SECTION("entries always lie in (0, 1]") {
        Rng rng(3);
        const AffinityModel m = init_affinity_model(6, 8, 4, 4);
        const Mat k = affinity(m, random_rows(5, 6, rng), random_rows(5, 6, rng));
        REQUIRE((k.array() > 0.0).all());
        REQUIRE((k.array() <= 1.0).all());
    }
    SECTION("permuting the left rows permutes the kernel rows") {
        Rng rng(5);
        const AffinityModel m = init_affinity_model(4, 8, 4, 6);
        const Mat x = random_rows(5, 4, rng), y = random_rows(5, 4, rng);
        const Permutation p = Permutation::random(5, rng);
        Mat xp(5, 4);
        for (int i = 0; i < 5; ++i) xp.row(p(i)) = x.row(i);
        const Mat k = affinity(m, x, y), kp = affinity(m, xp, y);
        for (int i = 0; i < 5; ++i) REQUIRE(exact_equal(kp.row(p(i)), k.row(i)));
    }
}

TEST_CASE("affinity weight gradients match finite differences") {
    Rng rng(7);
    const int n = 3, d_in = 4, hidden = 5, d_e = 3;
    AffinityModel m = init_affinity_model(d_in, hidden, d_e, 8);
    // random offsets keep pre-activations away from the ReLU kink
    for (int i = 0; i < hidden; ++i) {
        m.mlp_in.b1(i) += 0.05 * rng.normal();
        m.mlp_out.b1(i) += 0.05 * rng.normal();
    }
    const Mat x = random_rows(n, d_in, rng), y = random_rows(n, d_in, rng);
    Mat weight(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) weight(i, j) = rng.normal();

    // scalar probe: sum_ij weight_ij * K_ij
    auto probe = [&](const AffinityModel& model) { return affinity(model, x, y).cwiseProduct(weight).sum(); };

    const AffinityForward f = affinity_forward(m, x, y);
    const Mat k = (-f.cost).array().exp();
    const Mat d_cost = -k.cwiseProduct(weight);  // d(probe)/d(cost)
    const AffinityGrads grads = affinity_backward(m, x, y, f, d_cost, n, n);

    const double step = 1e-6;
    auto check = [&](double& coord, double grad) {
        const double orig = coord;
        coord = orig + step;
        const double hi = probe(m);
        coord = orig - step;
        const double lo = probe(m);
        coord = orig;
        const double fd = (hi - lo) / (2.0 * step);
        REQUIRE(std::abs(grad - fd) <= 1e-4 * (1.0 + std::abs(fd)));
    };
    for (int i = 0; i < d_in; ++i)
        for (int j = 0; j < hidden; ++j) check(m.mlp_in.w1(i, j), grads.in.w1(i, j));
    for (int i = 0; i < hidden; ++i)
        for (int j = 0; j < d_e; ++j) check(m.mlp_out.w2(i, j), grads.out.w2(i, j));
    for (int i = 0; i < hidden; ++i) check(m.mlp_in.b1(i), grads.in.b1(i));
    for (int i = 0; i < d_e; ++i) check(m.mlp_out.b2(i), grads.out.b2(i));
}

TEST_CASE("match modes") {
    Rng rng(9);
    const AffinityModel m = init_affinity_model(6, 8, 4, 10);
    const Mat x = random_rows(5, 6, rng), y = random_rows(5, 6, rng);

    SECTION("test mode yields a permutation matrix") {
        const TransportPlan t = match(m, x, y, MatchMode::test);
        REQUIRE(((t.array() == 0.0) || (t.array() == 1.0)).all());
        REQUIRE(is_bistochastic(t, 0.0));
    }
    SECTION("train mode yields a bistochastic plan") {
        // diagonal-dominant kernel, the regime a trained matcher operates in
        AffinityModel tied = m;
        tied.mlp_out = tied.mlp_in;
        const TransportPlan t = match(tied, x, x, MatchMode::train);
        REQUIRE(bistochastic_deviation(t) <= 1e-6);
        // plain projection of an arbitrary kernel converges as well
        SinkhornConfig plain;
        plain.epsilon = 1.0;
        REQUIRE(bistochastic_deviation(match(m, x, y, MatchMode::train, plain)) <= 1e-6);
    }
    SECTION("dominant diagonal selects the identity in both modes") {
        AffinityModel tied = m;
        tied.mlp_out = tied.mlp_in;
        const Mat z = random_rows(3, 6, rng);
        const TransportPlan hard = match(tied, z, z, MatchMode::test);
        REQUIRE(exact_equal(hard, Mat::Identity(3, 3)));
        const TransportPlan soft = match(tied, z, z, MatchMode::train);
        for (int i = 0; i < 3; ++i) {
            int argmax = 0;
            soft.row(i).maxCoeff(&argmax);
            REQUIRE(argmax == i);
        }
    }
}

TEST_CASE("matching whole graphs") {
    FeaturizerConfig feat;
    feat.noise_sigma = 0.0;
    const NodeEmbedding embed = featurizer_embedding(feat);

    SECTION("permuted copy with distinct labels is matched at cost zero") {
        SparseGraph g;
        g.n_f = 5;
        g.labels = {0, 1, 2, 3, 4};
        g.edges = {{0, 1, 0}, {1, 2, 0}, {2, 3, 0}, {3, 4, 0}, {0, 4, 0}};
        Rng rng(11);
        AffinityModel m = init_affinity_model(g.n_f * (feat.k + 1), 16, 8, 12);
        m.mlp_out = m.mlp_in;  // tied maps make equal features nearest neighbours
        const DenseGraph d1 = dense_from_sparse(g, 7);
        Permutation p = Permutation::identity(7);
        const Permutation act = Permutation::random(g.size(), rng);
        for (int i = 0; i < g.size(); ++i) p.perm[static_cast<std::size_t>(i)] = act(i);
        const DenseGraph d2 = apply_permutation(d1, p);
        const MatchGraphsResult res = match_graphs(m, d1, d2, embed);
        REQUIRE(res.edit_upper_bound == 0);
        REQUIRE(edit_exact(sparse_from_dense(d1, 0.5), sparse_from_dense(d2, 0.5)).distance == 0);
    }
    SECTION("bound dominates the exact distance on a random pool") {
        GenConfig gen;
        gen.flavor = GenFlavor::coloring;
        gen.n_min = 4;
        gen.n_max = 7;
        gen.seed = 41;
        Rng rng(13);
        const AffinityModel m = init_affinity_model(4 * (feat.k + 1), 16, 8, 14);
        for (int trial = 0; trial < 15; ++trial) {
            const SparseGraph a = generate(gen, rng);
            const SparseGraph b = generate(gen, rng);
            const int cap = std::max(a.size(), b.size());
            const MatchGraphsResult res = match_graphs(m, dense_from_sparse(a, cap), dense_from_sparse(b, cap), embed);
            REQUIRE(res.edit_upper_bound >= edit_exact(a, b).distance);
        }
    }
    SECTION("asymmetric graph against itself matches at cost zero") {
        GenConfig gen;
        gen.flavor = GenFlavor::coloring;
        gen.n_min = 5;
        gen.n_max = 7;
        gen.seed = 43;
        Rng rng(17);
        AffinityModel m = init_affinity_model(4 * (feat.k + 1), 16, 8, 18);
        m.mlp_out = m.mlp_in;
        int tested = 0;
        while (tested < 10) {
            const SparseGraph g = generate(gen, rng);
            if (!is_asymmetric(g)) continue;
            ++tested;
            const DenseGraph d = dense_from_sparse(g, 8);
            REQUIRE(match_graphs(m, d, d, embed).edit_upper_bound == 0);
        }
    }
}

TEST_CASE("matcher end-to-end gradient through the unrolled projection") {
    // one training example; every weight is checked against central
    // differences of the full loss chain (affinity -> 100 projection
    // iterations -> transported loss)
    GenConfig gen;
    gen.flavor = GenFlavor::coloring;
    gen.n_min = 5;
    gen.n_max = 5;
    gen.seed = 47;
    Rng rng(19);
    const SparseGraph g = generate(gen, rng);
    const int capacity = 7;

    FeaturizerConfig feat;
    feat.seed = 3;
    const FeaturizedPair pair = featurize(g, capacity, feat);
    FeaturizerConfig quiet = feat;
    quiet.noise_sigma = 0.0;

    const int d_in = 4 * (feat.k + 1);
    AffinityModel m = init_affinity_model(d_in, 6, 4, 20);
    for (int i = 0; i < 6; ++i) {
        m.mlp_in.b1(i) += 0.05 * rng.normal();
        m.mlp_out.b1(i) += 0.05 * rng.normal();
    }

    SinkhornConfig sk;  // 100 unrolled iterations
    const GroundLossSet gl = GroundLossSet::all_l2();
    const LossWeights w = LossWeights::defaults(capacity);

    auto forward_loss = [&](const AffinityModel& model) {
        const Mat x_in = pad_embedding(pair.input.F, model.u, pair.target);
        const Mat x_out = pad_embedding(featurize_deterministic(g, quiet).F, model.u, pair.target);
        const AffinityForward f = affinity_forward(model, x_in, x_out);
        const SinkhornTrace tr = sinkhorn_log_forward(-f.cost, sk);
        return lot_fast(pair.target, pair.target, tr.plan, gl, w);
    };

    // analytic gradients via the library backward chain
    const Mat x_in = pad_embedding(pair.input.F, m.u, pair.target);
    const Mat x_out = pad_embedding(featurize_deterministic(g, quiet).F, m.u, pair.target);
    const AffinityForward f = affinity_forward(m, x_in, x_out);
    const SinkhornTrace tr = sinkhorn_log_forward(-f.cost, sk);
    const Mat d_t = lot_gradients(pair.target, pair.target, tr.plan, gl, w).d_T;
    const Mat d_cost = -sinkhorn_log_backward(tr, d_t);
    const AffinityGrads grads = affinity_backward(m, x_in, x_out, f, d_cost, g.size(), g.size());

    const double step = 1e-5;
    int checked = 0;
    auto check = [&](double& coord, double grad) {
        const double orig = coord;
        coord = orig + step;
        const double hi = forward_loss(m);
        coord = orig - step;
        const double lo = forward_loss(m);
        coord = orig;
        const double fd = (hi - lo) / (2.0 * step);
        REQUIRE(std::abs(grad - fd) <= 1e-3 * (1.0 + std::abs(fd)));
        ++checked;
    };
    for (int i = 0; i < m.mlp_in.w1.rows(); ++i)
        for (int j = 0; j < m.mlp_in.w1.cols(); ++j) check(m.mlp_in.w1(i, j), grads.in.w1(i, j));
    for (int i = 0; i < m.mlp_in.w2.rows(); ++i)
        for (int j = 0; j < m.mlp_in.w2.cols(); ++j) check(m.mlp_in.w2(i, j), grads.in.w2(i, j));
    for (int i = 0; i < m.mlp_out.w1.rows(); ++i)
        for (int j = 0; j < m.mlp_out.w1.cols(); ++j) check(m.mlp_out.w1(i, j), grads.out.w1(i, j));
    for (int i = 0; i < m.mlp_out.w2.rows(); ++i)
        for (int j = 0; j < m.mlp_out.w2.cols(); ++j) check(m.mlp_out.w2(i, j), grads.out.w2(i, j));
    for (int i = 0; i < m.mlp_in.b1.size(); ++i) check(m.mlp_in.b1(i), grads.in.b1(i));
    for (int i = 0; i < m.mlp_in.b2.size(); ++i) check(m.mlp_in.b2(i), grads.in.b2(i));
    for (int i = 0; i < m.mlp_out.b1.size(); ++i) check(m.mlp_out.b1(i), grads.out.b1(i));
    for (int i = 0; i < m.mlp_out.b2.size(); ++i) check(m.mlp_out.b2(i), grads.out.b2(i));
    for (int i = 0; i < m.u.size(); ++i) check(m.u(i), grads.du(i));
    REQUIRE(checked > 200);
}

TEST_CASE("training the matcher") {
    GenConfig gen;
    gen.flavor = GenFlavor::coloring;
    gen.n_min = 4;
    gen.n_max = 6;
    gen.seed = 51;

    FeaturizerConfig feat;
    feat.seed = 1;
    const int capacity = 8;

    std::vector<FeaturizedPair> dataset;
    Rng rng(53);
    for (int i = 0; i < 24; ++i) {
        FeaturizerConfig fc = feat;
        fc.seed = static_cast<std::uint64_t>(1000 + i);
        dataset.push_back(featurize(generate(gen, rng), capacity, fc));
    }

    TrainConfig cfg;
    cfg.steps = 120;
    cfg.batch = 4;
    cfg.lr = 2e-3;
    cfg.seed = 5;

    const AffinityModel m0 = init_affinity_model(4 * (feat.k + 1), 16, 8, 22);

    SECTION("loss trace decreases") {
        const TrainResult res = train_matcher(m0, dataset, cfg);
        REQUIRE(res.trace.size() == 120);
        double head = 0.0, tail = 0.0;
        for (int i = 0; i < 20; ++i) {
            head += res.trace[static_cast<std::size_t>(i)];
            tail += res.trace[res.trace.size() - 1 - static_cast<std::size_t>(i)];
        }
        REQUIRE(tail < head);
    }
    SECTION("non-finite data reports divergence with the step") {
        std::vector<FeaturizedPair> poisoned = dataset;
        poisoned[0].input.F(0, 0) = std::numeric_limits<double>::quiet_NaN();
        TrainConfig fast = cfg;
        fast.steps = 40;
        REQUIRE_THROWS_AS(train_matcher(m0, poisoned, fast), std::runtime_error);
    }
    SECTION("empty dataset is rejected") {
        REQUIRE_THROWS_AS(train_matcher(m0, {}, cfg), std::invalid_argument);
    }
}
