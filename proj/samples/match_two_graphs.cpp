// Generates two colored graphs, matches their nodes with an untrained
// affinity model, and reports the edit-distance upper bound of the match
// against the exact edit distance.
#include <cstdio>

#include <graphot/graphot.hpp>

int main() {
    using namespace graphot;

    GenConfig gen;
    gen.flavor = GenFlavor::coloring;
    gen.n_min = 5;
    gen.n_max = 7;
    gen.seed = 42;
    Rng rng(gen.seed);
    const SparseGraph a = generate(gen, rng);
    const SparseGraph b = generate(gen, rng);

    const int capacity = std::max(a.size(), b.size());
    const DenseGraph da = dense_from_sparse(a, capacity);
    const DenseGraph db = dense_from_sparse(b, capacity);

    FeaturizerConfig feat;
    const int d_in = a.n_f * (feat.k + 1);
    const AffinityModel model = init_affinity_model(d_in, 32, 16, 1);

    const MatchGraphsResult res = match_graphs(model, da, db, featurizer_embedding(feat));
    const EditResult exact = edit_exact(a, b);

    std::printf("graph sizes: %d and %d\n", a.size(), b.size());
    std::printf("matched upper bound: %d\n", res.edit_upper_bound);
    std::printf("exact edit distance: %d\n", exact.distance);
    return 0;
}
