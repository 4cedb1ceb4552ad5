// Compares the transported loss with the reordering-based relaxation on a
// pair of graphs coupled by a soft plan: the reordering loss can vanish even
// though the graphs differ, while the transported loss stays positive.
#include <cstdio>

#include <graphot/graphot.hpp>

int main() {
    using namespace graphot;

    DenseGraph g, g_hat;
    g.h = Vec::Ones(2);
    g.F = Mat(2, 1);
    g.F << 0.5, 0.5;
    g.C.assign(1, Mat::Zero(2, 2));
    g_hat = g;
    g_hat.F << 1.0, 0.0;

    const TransportPlan uniform = Mat::Constant(2, 2, 0.5);
    const GroundLossSet gl = GroundLossSet::all_l2();
    const LossWeights w = LossWeights::unit();

    std::printf("transported loss, uniform plan: %.6f\n", lot_naive(g, g_hat, uniform, gl, w));
    std::printf("reordering loss, uniform plan:  %.6f\n", l_pigvae(g, g_hat, uniform, gl, w));
    std::printf("graphs isomorphic: %s\n", is_isomorphic_bruteforce(g, g_hat) ? "yes" : "no");

    const auto [perm, best] = exhaustive_min(g, g_hat, gl, w);
    std::printf("best permutation value: %.6f\n", best);
    return 0;
}
