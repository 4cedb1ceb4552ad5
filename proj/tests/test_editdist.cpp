#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace graphot;
using testutil::path3;
using testutil::triangle;

TEST_CASE("alignment cost examples") {
    SECTION("identical graphs under the identity cost nothing") {
        const SparseGraph g = triangle(2, 1);
        REQUIRE(align_cost(g, g, Permutation::identity(3)) == 0);
    }
    SECTION("single label substitution") {
        SparseGraph a = triangle(2, 1);
        SparseGraph b = a;
        b.labels[1] = 1;
        REQUIRE(align_cost(a, b, Permutation::identity(3)) == 1);
    }
    SECTION("triangle vs 2-path counts one edge deletion") {
        REQUIRE(align_cost(triangle(), path3(), Permutation::identity(3)) == 1);
    }
    SECTION("padding against padding is free") {
        SparseGraph a = triangle();
        SparseGraph b = triangle();
        REQUIRE(align_cost(a, b, Permutation::identity(6)) == 0);
    }
}

TEST_CASE("exact edit distance") {
    SECTION("permuted copies are at distance zero") {
        Rng rng(3);
        GenConfig gen;
        gen.flavor = GenFlavor::molecule;
        gen.n_f = 4;
        gen.n_c = 3;
        gen.n_min = 3;
        gen.n_max = 7;
        gen.seed = 13;
        for (int trial = 0; trial < 15; ++trial) {
            const SparseGraph g = generate(gen, rng);
            const Permutation p = Permutation::random(g.size(), rng);
            const EditResult r = edit_exact(g, permute_sparse(g, p.perm));
            REQUIRE(r.distance == 0);
        }
    }
    SECTION("pendant node costs a node and an edge insertion") {
        SparseGraph bigger = triangle();
        bigger.labels.push_back(0);
        bigger.edges.push_back({2, 3, 0});
        REQUIRE(edit_exact(triangle(), bigger).distance == 2);
        REQUIRE(edit_exact(bigger, triangle()).distance == 2);
    }
    SECTION("empty graph vs single node") {
        SparseGraph empty;
        SparseGraph one;
        one.labels = {0};
        REQUIRE(edit_exact(empty, one).distance == 1);
        REQUIRE(edit_exact(empty, empty).distance == 0);
    }
    SECTION("returned permutation realizes the distance") {
        Rng rng(5);
        GenConfig gen;
        gen.flavor = GenFlavor::coloring;
        gen.n_min = 4;
        gen.n_max = 6;
        gen.seed = 17;
        const SparseGraph a = generate(gen, rng);
        const SparseGraph b = generate(gen, rng);
        const EditResult r = edit_exact(a, b);
        REQUIRE(align_cost(a, b, r.permutation) == r.distance);
    }
    SECTION("size guard") {
        SparseGraph big;
        big.labels.assign(9, 0);
        REQUIRE_THROWS_AS(edit_exact(big, big), std::invalid_argument);
    }
}

TEST_CASE("edit distance agrees with the isomorphism oracle") {
    Rng rng(7);
    GenConfig gen;
    gen.flavor = GenFlavor::coloring;
    gen.n_min = 3;
    gen.n_max = 6;
    gen.seed = 19;
    const auto pool = generate_dataset(gen, 12);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        for (std::size_t j = i; j < pool.size(); ++j) {
            const int cap = std::max(pool[i].size(), pool[j].size());
            const bool iso = is_isomorphic_bruteforce(dense_from_sparse(pool[i], cap), dense_from_sparse(pool[j], cap));
            REQUIRE((edit_exact(pool[i], pool[j]).distance == 0) == iso);
        }
    }
}

TEST_CASE("edit distance metric properties on a seeded pool") {
    GenConfig gen;
    gen.flavor = GenFlavor::molecule;
    gen.n_f = 3;
    gen.n_c = 2;
    gen.n_min = 3;
    gen.n_max = 6;
    gen.seed = 23;
    const auto pool = generate_dataset(gen, 10);
    const std::size_t m = pool.size();
    std::vector<std::vector<int>> d(m, std::vector<int>(m, 0));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) d[i][j] = edit_exact(pool[i], pool[j]).distance;
    for (std::size_t i = 0; i < m; ++i) {
        REQUIRE(d[i][i] == 0);
        for (std::size_t j = 0; j < m; ++j) {
            REQUIRE(d[i][j] == d[j][i]);
            for (std::size_t k = 0; k < m; ++k) REQUIRE(d[i][k] <= d[i][j] + d[j][k]);
        }
    }
}

TEST_CASE("upper bound dominates the exact distance") {
    Rng rng(11);
    GenConfig gen;
    gen.flavor = GenFlavor::coloring;
    gen.n_min = 3;
    gen.n_max = 7;
    gen.seed = 29;
    for (int trial = 0; trial < 50; ++trial) {
        const SparseGraph a = generate(gen, rng);
        const SparseGraph b = generate(gen, rng);
        const int cap = std::max(a.size(), b.size());
        const EditResult exact = edit_exact(a, b);
        const EditResult bound = upper_bound(a, b, Permutation::random(cap, rng));
        REQUIRE(bound.distance >= exact.distance);
    }
    SECTION("the exact permutation is tight") {
        const SparseGraph a = generate(gen, rng);
        const SparseGraph b = generate(gen, rng);
        const EditResult exact = edit_exact(a, b);
        REQUIRE(upper_bound(a, b, exact.permutation).distance == exact.distance);
    }
}

TEST_CASE("gi accuracy") {
    const SparseGraph t = triangle();
    const SparseGraph p = path3();
    SECTION("identical pairs") {
        REQUIRE(gi_accuracy({{t, t}, {p, p}}) == 1.0);
    }
    SECTION("half isomorphic") {
        REQUIRE(gi_accuracy({{t, t}, {t, p}}) == 0.5);
    }
    SECTION("matches the mean of exact zero indicators") {
        Rng rng(13);
        GenConfig gen;
        gen.seed = 31;
        gen.n_min = 3;
        gen.n_max = 5;
        std::vector<std::pair<SparseGraph, SparseGraph>> pairs;
        double mean = 0.0;
        for (int i = 0; i < 10; ++i) {
            const SparseGraph a = generate(gen, rng);
            const SparseGraph b = rng.uniform() < 0.5 ? permute_sparse(a, Permutation::random(a.size(), rng).perm)
                                                      : generate(gen, rng);
            pairs.push_back({a, b});
            mean += edit_exact(a, b).distance == 0 ? 1.0 : 0.0;
        }
        REQUIRE(gi_accuracy(pairs) == Catch::Approx(mean / 10.0).margin(1e-12));
    }
}

TEST_CASE("automorphism counting") {
    REQUIRE(automorphism_count(triangle()) == 6);       // all same labels: S3
    REQUIRE(automorphism_count(path3()) == 2);          // the end swap
    SparseGraph asym = path3(2, 1);
    asym.labels = {0, 0, 1};
    REQUIRE(automorphism_count(asym) == 1);
    REQUIRE(is_asymmetric(asym));
    REQUIRE_FALSE(is_asymmetric(triangle()));
}
