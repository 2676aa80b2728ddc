#include "gpg/variation.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace gpg {

std::string VariantConfig::label() const {
    std::string s = gcs ? "gcs" + gcs_to_string(gcs) : "base";
    if (ssi_enabled) s += "_ssi";
    return s;
}

std::optional<GcsConfig> parse_gcs(const std::string& text) {
    if (text == "off") return std::nullopt;
    GcsConfig cfg;
    std::string t = text;
    if (!t.empty() && t.back() == '+') {
        cfg.backtrack = true;
        t.pop_back();
    }
    if (t == "1")
        cfg.max_arity = GcsArity::UpTo1;
    else if (t == "2")
        cfg.max_arity = GcsArity::UpTo2;
    else if (t == "3")
        cfg.max_arity = GcsArity::All;
    else
        throw std::runtime_error("invalid gcs value: " + text +
                                 " (expected off, 1, 1+, 2, 2+, 3 or 3+)");
    return cfg;
}

std::string gcs_to_string(const std::optional<GcsConfig>& gcs) {
    if (!gcs) return "off";
    std::string s;
    switch (gcs->max_arity) {
        case GcsArity::UpTo1: s = "1"; break;
        case GcsArity::UpTo2: s = "2"; break;
        case GcsArity::All: s = "3"; break;
    }
    if (gcs->backtrack) s += "+";
    return s;
}

VariantConfig variant_from_label(const std::string& label) {
    VariantConfig cfg;
    std::string t = label;
    const std::string suffix = "_ssi";
    if (t.size() >= suffix.size() && t.compare(t.size() - suffix.size(), suffix.size(), suffix) == 0) {
        cfg.ssi_enabled = true;
        t = t.substr(0, t.size() - suffix.size());
    }
    if (t == "base") {
        cfg.gcs = std::nullopt;
    } else if (t.rfind("gcs", 0) == 0) {
        cfg.gcs = parse_gcs(t.substr(3));
    } else {
        throw std::runtime_error("invalid configuration label: " + label);
    }
    return cfg;
}

std::vector<VariantConfig> enumerate_variants(int branching) {
    std::vector<std::string> gcs_values = {"off", "1", "1+", "2", "2+"};
    if (branching == 3) {
        gcs_values.push_back("3");
        gcs_values.push_back("3+");
    }
    std::vector<VariantConfig> out;
    for (bool ssi_on : {false, true}) {
        for (const auto& gv : gcs_values) {
            VariantConfig cfg;
            cfg.gcs = parse_gcs(gv);
            cfg.ssi_enabled = ssi_on;
            out.push_back(cfg);
        }
    }
    return out;
}

std::vector<std::vector<int>> child_options(int arity, bool commutative, int branching,
                                            bool allow_ternary) {
    if (arity < 1 || arity > branching)
        throw std::invalid_argument("child_options: arity out of range");

    auto enumerate = [branching](int k, bool ascending_only) {
        std::vector<std::vector<int>> tuples;
        std::vector<int> cur;
        std::vector<bool> used(static_cast<size_t>(branching), false);
        auto rec = [&](auto&& self) -> void {
            if (static_cast<int>(cur.size()) == k) {
                tuples.push_back(cur);
                return;
            }
            for (int s = 0; s < branching; ++s) {
                if (used[static_cast<size_t>(s)]) continue;
                if (ascending_only && !cur.empty() && s < cur.back()) continue;
                used[static_cast<size_t>(s)] = true;
                cur.push_back(s);
                self(self);
                cur.pop_back();
                used[static_cast<size_t>(s)] = false;
            }
        };
        rec(rec);
        return tuples;
    };

    std::vector<std::vector<int>> options = enumerate(arity, commutative);
    if (allow_ternary && arity < 3 && branching == 3) {
        auto ternary = enumerate(3, commutative);
        options.insert(options.end(), ternary.begin(), ternary.end());
    }
    return options;
}

namespace {

void apply_selection(GenotypeNode& node, const std::vector<int>& tuple) {
    node.n_sel = static_cast<uint8_t>(tuple.size());
    for (size_t k = 0; k < tuple.size(); ++k) node.sel[k] = static_cast<uint8_t>(tuple[k]);
}

std::vector<int> current_selection(const GenotypeNode& node) {
    std::vector<int> t(node.n_sel);
    for (int k = 0; k < node.n_sel; ++k) t[static_cast<size_t>(k)] = node.sel[static_cast<size_t>(k)];
    return t;
}

// accept-if-not-worse bookkeeping shared by the three operators
bool commit_if_not_worse(Individual& ind, const FitnessRecord& cand, EvalBudget& budget) {
    ++budget.audit.events;
    if (cand.mse <= ind.fit.mse) {
        if (cand.mse > ind.fit.mse) ++budget.audit.violations;
        const bool strict = cand.mse < ind.fit.mse;
        ind.fit = cand;
        return strict;
    }
    return false;
}

} // namespace

bool gom(Individual& ind, const LinkageTree& fos, const std::vector<Individual>& pop,
         const OperatorSet& opset, const Dataset& train, EvalBudget& budget, Rng& rng) {
    std::vector<size_t> order(fos.subsets.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);

    bool improved = false;
    std::vector<std::pair<int, GenotypeNode>> backup;
    for (size_t oi : order) {
        if (budget.exhausted()) break;
        const auto& subset = fos.subsets[oi];
        const Individual& donor = pop[rng.next_below(pop.size())];

        backup.clear();
        bool changed = false;
        for (int pos : subset) {
            const auto& theirs = donor.genotype.nodes[static_cast<size_t>(pos)];
            auto& ours = ind.genotype.nodes[static_cast<size_t>(pos)];
            if (ours == theirs) continue;
            backup.emplace_back(pos, ours);
            ours = theirs;
            changed = true;
        }
        if (!changed) continue; // identical donor material: accepted no-op, no evaluation

        auto revert = [&] {
            for (const auto& [pos, node] : backup)
                ind.genotype.nodes[static_cast<size_t>(pos)] = node;
        };

        if (!check_type_constraints(ind.genotype, opset)) {
            revert(); // rejected without an evaluation
            continue;
        }
        if (budget.exhausted()) {
            revert();
            break;
        }
        const FitnessRecord cand = fitness(ind.genotype, opset, train, budget);
        ++budget.audit.gom_evals;
        if (cand.mse <= ind.fit.mse) {
            improved |= commit_if_not_worse(ind, cand, budget);
        } else {
            ++budget.audit.events;
            revert();
        }
        if (budget.audit.on_event) budget.audit.on_event(ind.genotype);
    }
    return improved;
}

namespace {

// copy the active subtree rooted at src_pos onto dst_pos; untouched slots
// keep their previous nodes as syntactic introns
void transplant(Genotype& dst, int dst_pos, const Genotype& src, int src_pos) {
    const auto& src_node = src.nodes[static_cast<size_t>(src_pos)];
    dst.nodes[static_cast<size_t>(dst_pos)] = src_node;
    for (int k = 0; k < src_node.n_sel; ++k) {
        const int slot = src_node.sel[static_cast<size_t>(k)];
        transplant(dst, dst.tmpl.child(dst_pos, slot), src, src.tmpl.child(src_pos, slot));
    }
}

} // namespace

bool ssi(Individual& ind, const std::vector<Individual>& pop, const OperatorSet& opset,
         const Dataset& train, EvalBudget& budget, Rng& rng) {
    // snapshot of the nodes to visit; transplants may retype later entries,
    // so each is re-validated at its turn
    std::vector<int> targets;
    {
        const auto mask = active_mask(ind.genotype);
        for (size_t i = 0; i < mask.size(); ++i)
            if (mask[i] && ind.genotype.nodes[i].n_sel > 0) targets.push_back(static_cast<int>(i));
    }
    rng.shuffle(targets);

    std::vector<size_t> donor_order(pop.size());
    for (size_t i = 0; i < donor_order.size(); ++i) donor_order[i] = i;

    bool improved = false;
    for (int v : targets) {
        if (budget.exhausted()) break;
        const auto mask = active_mask(ind.genotype);
        if (!mask[static_cast<size_t>(v)]) continue;
        const int16_t wanted_symbol = ind.genotype.nodes[static_cast<size_t>(v)].symbol;
        if (opset[wanted_symbol].is_terminal()) continue;
        const int avail_height =
            ind.genotype.tmpl.depth - ind.genotype.tmpl.node_depth[static_cast<size_t>(v)];

        rng.shuffle(donor_order);
        const Genotype* donor_genotype = nullptr;
        int donor_node = -1;
        Genotype self_copy;
        for (size_t di : donor_order) {
            const Genotype& dg = pop[di].genotype;
            std::vector<int> candidates;
            for (int u : active_nodes(dg)) {
                if (dg.nodes[static_cast<size_t>(u)].symbol != wanted_symbol) continue;
                if (subtree_effective_depth(dg, u) > avail_height) continue;
                candidates.push_back(u);
            }
            if (candidates.empty()) continue;
            donor_node = candidates[rng.next_below(candidates.size())];
            if (&dg == &ind.genotype) {
                self_copy = dg; // donor aliases the receiver; transplant from a snapshot
                donor_genotype = &self_copy;
            } else {
                donor_genotype = &dg;
            }
            break;
        }
        if (donor_genotype == nullptr) continue; // no suitable donor, no operation

        // back up the template region below v (contiguous in pre-order)
        const int region =
            ind.genotype.tmpl.subtree_size[static_cast<size_t>(
                ind.genotype.tmpl.node_depth[static_cast<size_t>(v)])];
        std::vector<GenotypeNode> backup(ind.genotype.nodes.begin() + v,
                                         ind.genotype.nodes.begin() + v + region);

        transplant(ind.genotype, v, *donor_genotype, donor_node);

        const bool same = std::equal(backup.begin(), backup.end(),
                                     ind.genotype.nodes.begin() + v);
        if (same) continue; // accepted no-op, no evaluation

        auto revert = [&] {
            std::copy(backup.begin(), backup.end(), ind.genotype.nodes.begin() + v);
        };
        if (!check_type_constraints(ind.genotype, opset)) {
            revert();
            continue;
        }
        if (budget.exhausted()) {
            revert();
            break;
        }
        const FitnessRecord cand = fitness(ind.genotype, opset, train, budget);
        ++budget.audit.ssi_evals;
        if (cand.mse <= ind.fit.mse) {
            improved |= commit_if_not_worse(ind, cand, budget);
        } else {
            ++budget.audit.events;
            revert();
        }
        if (budget.audit.on_event) budget.audit.on_event(ind.genotype);
    }
    return improved;
}

namespace {

struct GcsSweep {
    Individual& ind;
    const GcsConfig& cfg;
    const OperatorSet& opset;
    const Dataset& train;
    EvalBudget& budget;
    bool improved = false;

    bool arity_in_scope(int arity) const {
        switch (cfg.max_arity) {
            case GcsArity::UpTo1: return arity == 1;
            case GcsArity::UpTo2: return arity <= 2;
            case GcsArity::All: return arity <= 3;
        }
        return false;
    }

    void optimize_subtree(int v) {
        const auto& node = ind.genotype.nodes[static_cast<size_t>(v)];
        if (node.n_sel == 0) return;
        // children first: their subtrees are settled when the parent decides
        for (int k = 0; k < node.n_sel; ++k) {
            optimize_subtree(
                ind.genotype.tmpl.child(v, node.sel[static_cast<size_t>(k)]));
            if (budget.exhausted()) return;
        }
        const auto& sym = opset[ind.genotype.nodes[static_cast<size_t>(v)].symbol];
        if (arity_in_scope(sym.arity)) optimize_node(v);
    }

    void optimize_node(int v) {
        auto& node = ind.genotype.nodes[static_cast<size_t>(v)];
        const auto& sym = opset[node.symbol];
        const int branching = ind.genotype.tmpl.branching;
        const bool allow_ternary =
            sym.ternary_extension && branching == 3 && cfg.max_arity == GcsArity::All;
        const auto options = child_options(sym.arity, sym.commutative, branching, allow_ternary);

        const std::vector<int> incumbent = current_selection(node);
        const std::vector<bool> was_active = active_mask(ind.genotype);

        std::vector<int> winner = incumbent;
        FitnessRecord winner_fit = ind.fit;
        for (const auto& option : options) {
            if (budget.exhausted()) break;
            apply_selection(node, option);
            if (!check_type_constraints(ind.genotype, opset)) continue; // no evaluation
            const FitnessRecord cand = fitness(ind.genotype, opset, train, budget);
            ++budget.audit.gcs_evals;
            // strict improvement only: the incumbent wins all ties
            if (cand.mse < winner_fit.mse) {
                winner = option;
                winner_fit = cand;
            }
        }

        apply_selection(node, winner);
        ++budget.audit.events;
        if (winner_fit.mse > ind.fit.mse) ++budget.audit.violations;
        if (budget.audit.on_event) budget.audit.on_event(ind.genotype);
        const bool changed = winner != incumbent;
        if (changed) {
            improved = true;
            ind.fit = winner_fit;
        }

        if (changed && cfg.backtrack) {
            // descend into subtrees that this decision activated from intron
            // status before moving on
            for (int slot : winner) {
                const int c = ind.genotype.tmpl.child(v, slot);
                if (!was_active[static_cast<size_t>(c)]) {
                    optimize_subtree(c);
                    if (budget.exhausted()) return;
                }
            }
        }
    }
};

} // namespace

bool gcs(Individual& ind, const GcsConfig& cfg, const OperatorSet& opset, const Dataset& train,
         EvalBudget& budget) {
    GcsSweep sweep{ind, cfg, opset, train, budget};
    sweep.optimize_subtree(0);
    return sweep.improved;
}

} // namespace gpg
