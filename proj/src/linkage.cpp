#include "gpg/linkage.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace gpg {

std::vector<std::vector<int>> discretize_population(const std::vector<Genotype>& pop,
                                                    const OperatorSet& opset) {
    if (pop.empty()) throw std::invalid_argument("discretize_population: empty population");
    const size_t node_count = pop.front().nodes.size();
    const size_t pop_size = pop.size();

    double cmin = 0.0;
    double cmax = 0.0;
    bool any_const = false;
    for (const auto& g : pop) {
        for (const auto& node : g.nodes) {
            if (opset[node.symbol].kind != SymbolKind::Constant) continue;
            if (!any_const) {
                cmin = cmax = node.const_value;
                any_const = true;
            } else {
                cmin = std::min(cmin, node.const_value);
                cmax = std::max(cmax, node.const_value);
            }
        }
    }
    const double width = cmax - cmin;

    std::vector<std::vector<int>> cats(node_count, std::vector<int>(pop_size));
    for (size_t p = 0; p < pop_size; ++p) {
        for (size_t i = 0; i < node_count; ++i) {
            const auto& node = pop[p].nodes[i];
            int cat = node.symbol;
            if (opset[node.symbol].kind == SymbolKind::Constant) {
                int bin = 0;
                if (width > 0.0) {
                    bin = static_cast<int>(std::floor(kConstantBins *
                                                      (node.const_value - cmin) / width));
                    bin = std::clamp(bin, 0, kConstantBins - 1);
                }
                cat = opset.size() + bin;
            }
            cats[i][p] = cat;
        }
    }
    return cats;
}

namespace {

double entropy(const std::vector<int>& row) {
    std::unordered_map<int, int> counts;
    for (int c : row) ++counts[c];
    const double n = static_cast<double>(row.size());
    double h = 0.0;
    for (const auto& [cat, cnt] : counts) {
        const double p = static_cast<double>(cnt) / n;
        h -= p * std::log(p);
    }
    return h;
}

} // namespace

std::vector<std::vector<double>> pairwise_mi(const std::vector<std::vector<int>>& cats) {
    const size_t n = cats.size();
    const size_t pop = n > 0 ? cats.front().size() : 0;
    if (pop < 2) throw std::invalid_argument("pairwise_mi: population size must be >= 2");

    std::vector<std::vector<double>> mi(n, std::vector<double>(n, 0.0));
    std::unordered_map<int64_t, int> joint;
    for (size_t i = 0; i < n; ++i) {
        mi[i][i] = entropy(cats[i]);
        for (size_t j = i + 1; j < n; ++j) {
            joint.clear();
            std::unordered_map<int, int> pa;
            std::unordered_map<int, int> pb;
            for (size_t s = 0; s < pop; ++s) {
                const int a = cats[i][s];
                const int b = cats[j][s];
                ++pa[a];
                ++pb[b];
                ++joint[(static_cast<int64_t>(a) << 32) | static_cast<uint32_t>(b)];
            }
            const double np = static_cast<double>(pop);
            double v = 0.0;
            for (const auto& [key, cnt] : joint) {
                const int a = static_cast<int>(key >> 32);
                const int b = static_cast<int>(key & 0xFFFFFFFF);
                const double pab = static_cast<double>(cnt) / np;
                const double paa = static_cast<double>(pa[a]) / np;
                const double pbb = static_cast<double>(pb[b]) / np;
                v += pab * std::log(pab / (paa * pbb));
            }
            if (v < 0.0) v = 0.0; // numeric dust on independent rows
            mi[i][j] = mi[j][i] = v;
        }
    }
    return mi;
}

LinkageTree build_linkage_tree(const std::vector<std::vector<double>>& mi, Rng& rng) {
    const size_t n = mi.size();
    if (n == 0) throw std::invalid_argument("build_linkage_tree: empty MI matrix");

    LinkageTree lt;
    lt.subsets.reserve(2 * n - 1);
    // cluster state: similarity matrix shrinks as clusters merge (UPGMA
    // average update), member lists accumulate
    std::vector<std::vector<int>> members(n);
    std::vector<double> sizes(n, 1.0);
    std::vector<std::vector<double>> sim = mi;
    std::vector<int> alive(n);
    for (size_t i = 0; i < n; ++i) {
        members[i] = {static_cast<int>(i)};
        lt.subsets.push_back(members[i]);
        alive[i] = static_cast<int>(i);
    }

    while (alive.size() > 1) {
        // max average-MI pair among alive clusters, ties uniform at random
        double best = -1.0;
        size_t na = 0; // number of best-tied pairs seen
        size_t pick_a = 0;
        size_t pick_b = 0;
        for (size_t ai = 0; ai + 1 < alive.size(); ++ai) {
            for (size_t bi = ai + 1; bi < alive.size(); ++bi) {
                const double s = sim[static_cast<size_t>(alive[ai])][static_cast<size_t>(alive[bi])];
                if (s > best) {
                    best = s;
                    na = 1;
                    pick_a = ai;
                    pick_b = bi;
                } else if (s == best) {
                    // reservoir choice among ties
                    ++na;
                    if (rng.next_below(na) == 0) {
                        pick_a = ai;
                        pick_b = bi;
                    }
                }
            }
        }
        const size_t a = static_cast<size_t>(alive[pick_a]);
        const size_t b = static_cast<size_t>(alive[pick_b]);

        std::vector<int> merged = members[a];
        merged.insert(merged.end(), members[b].begin(), members[b].end());
        std::sort(merged.begin(), merged.end());
        lt.subsets.push_back(merged);

        // fold b into a with size-weighted average similarity
        for (int cid : alive) {
            const size_t c = static_cast<size_t>(cid);
            if (c == a || c == b) continue;
            const double s =
                (sizes[a] * sim[a][c] + sizes[b] * sim[b][c]) / (sizes[a] + sizes[b]);
            sim[a][c] = sim[c][a] = s;
        }
        members[a] = std::move(merged);
        sizes[a] += sizes[b];
        alive.erase(alive.begin() + static_cast<ptrdiff_t>(pick_b));
    }
    return lt;
}

LinkageTree learn_linkage(const std::vector<Genotype>& pop, const OperatorSet& opset, Rng& rng) {
    return build_linkage_tree(pairwise_mi(discretize_population(pop, opset)), rng);
}

} // namespace gpg
