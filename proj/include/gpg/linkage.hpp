#pragma once

#include <vector>

#include "gpg/rng.hpp"
#include "gpg/symbols.hpp"
#include "gpg/tree.hpp"

namespace gpg {

constexpr int kConstantBins = 25;

// Family of subsets over template positions, learned each generation.
// Singletons come first, merged sets follow in merge order; the root set (all
// positions) is kept. Total count is 2n-1.
struct LinkageTree {
    std::vector<std::vector<int>> subsets;
};

// Per-position category ids over the population, node_count rows by pop_size
// columns. Constants are discretized into 25 equal-width bins over the value
// range observed across the whole population snapshot.
std::vector<std::vector<int>> discretize_population(const std::vector<Genotype>& pop,
                                                    const OperatorSet& opset);

// Empirical pairwise mutual information (natural log, plug-in estimator).
std::vector<std::vector<double>> pairwise_mi(const std::vector<std::vector<int>>& cats);

// UPGMA over MI similarity: repeatedly merge the pair of clusters with
// maximal average pairwise MI, ties broken uniformly at random.
LinkageTree build_linkage_tree(const std::vector<std::vector<double>>& mi, Rng& rng);

// convenience for one generation step
LinkageTree learn_linkage(const std::vector<Genotype>& pop, const OperatorSet& opset, Rng& rng);

} // namespace gpg
