#pragma once

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "graphot/graph.hpp"

namespace graphot {

struct EditResult {
    int distance = 0;
    Permutation permutation;
};

namespace detail {

// label at (i, j), -1 for no edge; padded slots have no edges
inline std::vector<std::vector<int>> edge_label_table(const SparseGraph& g, int capacity) {
    std::vector<std::vector<int>> t(static_cast<std::size_t>(capacity),
                                    std::vector<int>(static_cast<std::size_t>(capacity), -1));
    for (const auto& e : g.edges) {
        t[static_cast<std::size_t>(e.src)][static_cast<std::size_t>(e.dst)] = e.label;
        t[static_cast<std::size_t>(e.dst)][static_cast<std::size_t>(e.src)] = e.label;
    }
    return t;
}

inline int node_mismatch(const SparseGraph& a, const SparseGraph& b, int i, int j) {
    const bool real_a = i < a.size(), real_b = j < b.size();
    if (real_a && real_b) return a.labels[static_cast<std::size_t>(i)] == b.labels[static_cast<std::size_t>(j)] ? 0 : 1;
    return real_a == real_b ? 0 : 1;
}

}  // namespace detail

// Unit-cost alignment cost under a fixed permutation of the padded slots:
// one per node mismatch (label substitution or insertion/deletion) plus one
// per mismatched unordered node pair (edge insertion/deletion/substitution).
inline int align_cost(const SparseGraph& a, const SparseGraph& b, const Permutation& p) {
    const int capacity = p.size();
    if (capacity < a.size() || capacity < b.size())
        throw std::invalid_argument("align_cost: permutation smaller than the graphs");
    const auto ta = detail::edge_label_table(a, capacity);
    const auto tb = detail::edge_label_table(b, capacity);
    int cost = 0;
    for (int i = 0; i < capacity; ++i) cost += detail::node_mismatch(a, b, i, p(i));
    for (int i = 0; i < capacity; ++i)
        for (int k = i + 1; k < capacity; ++k)
            if (ta[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] !=
                tb[static_cast<std::size_t>(p(i))][static_cast<std::size_t>(p(k))])
                ++cost;
    return cost;
}

// Exact edit distance by exhaustive search over permutations of the padded
// slot set (capacity = the larger size), with branch-and-bound pruning on
// the running cost. Lexicographically smallest optimal permutation wins.
inline EditResult edit_exact(const SparseGraph& a, const SparseGraph& b) {
    const int capacity = std::max(a.size(), b.size());
    if (capacity > 8) throw std::invalid_argument("edit_exact: graphs larger than 8 active nodes");
    if (capacity == 0) return {0, Permutation::identity(0)};
    const auto ta = detail::edge_label_table(a, capacity);
    const auto tb = detail::edge_label_table(b, capacity);

    std::vector<int> assign(static_cast<std::size_t>(capacity), -1);
    std::vector<char> used(static_cast<std::size_t>(capacity), 0);
    int best = std::numeric_limits<int>::max();
    std::vector<int> best_assign;

    auto recurse = [&](auto&& self, int i, int partial) -> void {
        if (partial >= best) return;
        if (i == capacity) {
            best = partial;
            best_assign = assign;
            return;
        }
        for (int j = 0; j < capacity; ++j) {
            if (used[static_cast<std::size_t>(j)]) continue;
            int cost = partial + detail::node_mismatch(a, b, i, j);
            for (int k = 0; k < i && cost < best; ++k)
                if (ta[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] !=
                    tb[static_cast<std::size_t>(assign[static_cast<std::size_t>(k)])][static_cast<std::size_t>(j)])
                    ++cost;
            if (cost >= best) continue;
            assign[static_cast<std::size_t>(i)] = j;
            used[static_cast<std::size_t>(j)] = 1;
            self(self, i + 1, cost);
            used[static_cast<std::size_t>(j)] = 0;
            assign[static_cast<std::size_t>(i)] = -1;
        }
    };
    recurse(recurse, 0, 0);
    return {best, Permutation{best_assign}};
}

// Alignment cost under a supplied permutation; never below the exact edit
// distance.
inline EditResult upper_bound(const SparseGraph& a, const SparseGraph& b, const Permutation& p) {
    return {align_cost(a, b, p), p};
}

// Fraction of pairs at edit distance zero.
inline double gi_accuracy(const std::vector<std::pair<SparseGraph, SparseGraph>>& pairs) {
    if (pairs.empty()) return 0.0;
    int hits = 0;
    for (const auto& [a, b] : pairs)
        if (edit_exact(a, b).distance == 0) ++hits;
    return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

// Number of label- and edge-preserving self-maps; 1 means the graph is rigid.
inline int automorphism_count(const SparseGraph& g) {
    const int n = g.size();
    if (n > 8) throw std::invalid_argument("automorphism_count: graphs larger than 8 nodes");
    SparseGraph ref = g;
    std::sort(ref.edges.begin(), ref.edges.end());
    std::vector<int> sigma(static_cast<std::size_t>(n));
    std::iota(sigma.begin(), sigma.end(), 0);
    int count = 0;
    do {
        if (permute_sparse(ref, sigma) == ref) ++count;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return count;
}

inline bool is_asymmetric(const SparseGraph& g) { return automorphism_count(g) == 1; }

}  // namespace graphot
