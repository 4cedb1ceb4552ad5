#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace graphot;
using testutil::triangle;

TEST_CASE("dense_from_sparse smallest instance") {
    SparseGraph g;
    g.n_f = 2;
    g.n_c = 1;
    g.labels = {0};
    DenseGraph d = dense_from_sparse(g, 2);
    REQUIRE(d.h(0) == 1.0);
    REQUIRE(d.h(1) == 0.0);
    REQUIRE(d.F(0, 0) == 1.0);
    REQUIRE(d.F(0, 1) == 0.0);
    REQUIRE(d.F.row(1).isZero());
    REQUIRE(d.edge_dim() == 2);
    REQUIRE(testutil::exact_equal(d.C[0], Mat::Ones(2, 2)));  // "no edge" everywhere
    REQUIRE(d.C[1].isZero(0.0));
}

TEST_CASE("dense_from_sparse triangle channels") {
    DenseGraph d = dense_from_sparse(triangle(), 3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const double no_edge = d.C[0](i, j), edge = d.C[1](i, j);
            if (i == j) {
                REQUIRE(no_edge == 1.0);
                REQUIRE(edge == 0.0);
            } else {
                REQUIRE(no_edge == 0.0);
                REQUIRE(edge == 1.0);
            }
        }
    }
}

TEST_CASE("dense_from_sparse capacity error") {
    REQUIRE_THROWS_AS(dense_from_sparse(triangle(), 2), std::invalid_argument);
}

TEST_CASE("sparse/dense round trip on random graphs") {
    GenConfig cfg;
    cfg.flavor = GenFlavor::molecule;
    cfg.n_min = 1;
    cfg.n_max = 9;
    cfg.n_f = 5;
    cfg.n_c = 4;
    cfg.seed = 7;
    for (const auto& g : generate_dataset(cfg, 100)) {
        const DenseGraph d = dense_from_sparse(g, 12);
        const SparseGraph back = sparse_from_dense(d, 0.5);
        REQUIRE(canonical_form(back) == canonical_form(g));
        REQUIRE(back == g);  // decoding preserves index order outright
    }
}

TEST_CASE("dense_from_sparse injective on canonical forms") {
    GenConfig cfg;
    cfg.flavor = GenFlavor::coloring;
    cfg.seed = 3;
    cfg.n_min = 4;
    cfg.n_max = 6;
    const auto pool = generate_dataset(cfg, 30);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        for (std::size_t j = i + 1; j < pool.size(); ++j) {
            const SparseGraph a = canonical_form(pool[i]), b = canonical_form(pool[j]);
            if (a == b) continue;
            const DenseGraph da = dense_from_sparse(a, 8), db = dense_from_sparse(b, 8);
            REQUIRE_FALSE(testutil::dense_exact_equal(da, db));
        }
    }
}

TEST_CASE("sparse_from_dense thresholding and ties") {
    DenseGraph d;
    d.h = Vec(2);
    d.h << 0.9, 0.1;
    d.F = Mat::Zero(2, 2);
    d.F << 0.5, 0.5, 0.3, 0.2;  // tied row resolves to label 0
    d.C.assign(2, Mat::Zero(2, 2));
    const SparseGraph g = sparse_from_dense(d, 0.5);
    REQUIRE(g.size() == 1);
    REQUIRE(g.labels[0] == 0);
    REQUIRE_THROWS_AS(sparse_from_dense(d, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(sparse_from_dense(d, 1.0), std::invalid_argument);
}

TEST_CASE("apply_permutation basics") {
    Rng rng(11);
    GenConfig cfg;
    cfg.seed = 5;
    const SparseGraph g = generate(cfg, rng);
    const DenseGraph d = dense_from_sparse(g, g.size() + 2);

    SECTION("identity leaves the graph unchanged") {
        const DenseGraph e = apply_permutation(d, Permutation::identity(d.size()));
        REQUIRE(testutil::dense_exact_equal(e, d));
    }

    SECTION("permutation then inverse is exact") {
        const Permutation p = Permutation::random(d.size(), rng);
        const DenseGraph e = apply_permutation(apply_permutation(d, p), p.inverse());
        REQUIRE(testutil::dense_exact_equal(e, d));
    }

    SECTION("edge channels stay symmetric") {
        const Permutation p = Permutation::random(d.size(), rng);
        REQUIRE(apply_permutation(d, p).edge_channels_symmetric());
    }
}

TEST_CASE("apply_permutation two-node swap") {
    SparseGraph g;
    g.n_f = 2;
    g.n_c = 1;
    g.labels = {0, 1};
    g.edges = {{0, 1, 0}};
    const DenseGraph d = dense_from_sparse(g, 2);
    Permutation swap;
    swap.perm = {1, 0};
    const DenseGraph e = apply_permutation(d, swap);
    REQUIRE(testutil::exact_equal(e.F.row(0), d.F.row(1)));
    REQUIRE(testutil::exact_equal(e.F.row(1), d.F.row(0)));
    for (int c = 0; c < d.edge_dim(); ++c) {
        REQUIRE(e.C[static_cast<std::size_t>(c)](0, 1) == d.C[static_cast<std::size_t>(c)](1, 0));
        REQUIRE(e.C[static_cast<std::size_t>(c)](0, 0) == d.C[static_cast<std::size_t>(c)](1, 1));
    }
}

TEST_CASE("isomorphism oracle") {
    Rng rng(23);
    GenConfig cfg;
    cfg.flavor = GenFlavor::coloring;
    cfg.n_min = 4;
    cfg.n_max = 6;

    SECTION("permuted copies are isomorphic") {
        for (int trial = 0; trial < 20; ++trial) {
            const SparseGraph g = generate(cfg, rng);
            const DenseGraph d = dense_from_sparse(g, 8);
            // permutation that keeps padding slots on padding slots
            Permutation p = Permutation::identity(8);
            Permutation active = Permutation::random(g.size(), rng);
            for (int i = 0; i < g.size(); ++i) p.perm[static_cast<std::size_t>(i)] = active(i);
            REQUIRE(is_isomorphic_bruteforce(d, apply_permutation(d, p)));
        }
    }

    SECTION("triangle and path are not isomorphic") {
        REQUIRE_FALSE(is_isomorphic_bruteforce(dense_from_sparse(triangle(), 4), dense_from_sparse(testutil::path3(), 4)));
    }

    SECTION("different active sizes differ") {
        SparseGraph one;
        one.labels = {0};
        REQUIRE_FALSE(is_isomorphic_bruteforce(dense_from_sparse(one, 4), dense_from_sparse(triangle(), 4)));
    }

    SECTION("size guard") {
        SparseGraph big;
        big.labels.assign(11, 0);
        const DenseGraph d = dense_from_sparse(big, 11);
        REQUIRE_THROWS_AS(is_isomorphic_bruteforce(d, d), std::invalid_argument);
    }
}

TEST_CASE("plan from permutation couples graph with its image") {
    Rng rng(5);
    const Permutation p = Permutation::random(6, rng);
    const TransportPlan t = plan_from_permutation(p);
    REQUIRE(is_bistochastic(t, 0.0));
    for (int i = 0; i < 6; ++i) REQUIRE(t(i, p(i)) == 1.0);
}

TEST_CASE("sparse graph validation") {
    SparseGraph g;
    g.n_f = 2;
    g.n_c = 1;
    g.labels = {0, 1};
    g.edges = {{0, 1, 0}};
    REQUIRE_NOTHROW(g.validate());
    SECTION("label range") {
        g.labels[0] = 2;
        REQUIRE_THROWS_AS(g.validate(), std::invalid_argument);
    }
    SECTION("edge orientation") {
        g.edges[0] = {1, 0, 0};
        REQUIRE_THROWS_AS(g.validate(), std::invalid_argument);
    }
    SECTION("self loop") {
        g.edges[0] = {1, 1, 0};
        REQUIRE_THROWS_AS(g.validate(), std::invalid_argument);
    }
    SECTION("duplicate edge") {
        g.edges.push_back({0, 1, 0});
        REQUIRE_THROWS_AS(g.validate(), std::invalid_argument);
    }
}
