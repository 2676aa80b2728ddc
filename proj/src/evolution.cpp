#include "gpg/evolution.hpp"

#include <algorithm>
#include <cmath>

namespace gpg {

double PopulationState::mean_mse() const {
    if (individuals.empty()) return kWorstMse;
    double sum = 0.0;
    for (const auto& ind : individuals) sum += ind.fit.mse;
    return sum / static_cast<double>(individuals.size());
}

void PopulationState::observe(const Individual& ind) {
    if (!elite || ind.fit.mse < elite->fit.mse) elite = ind;
}

void RunMonitor::observe(const Individual& ind) {
    if (!elite_ || ind.fit.mse < elite_->fit.mse) elite_ = ind;
    flush_checkpoints();
}

namespace {

double json_safe(double v) { return std::isfinite(v) ? v : 1.0e308; }

} // namespace

void RunMonitor::flush_checkpoints() {
    while (budget_.checkpoint_due()) {
        const uint64_t threshold = budget_.pop_checkpoint();
        CheckpointRecord c;
        c.fe_threshold = threshold;
        if (elite_) {
            const FitnessRecord test_fit = compute_metrics(elite_->genotype, ctx_.opset, ctx_.test);
            c.train_mse = json_safe(elite_->fit.mse);
            c.train_r2 = elite_->fit.r2;
            c.test_mse = json_safe(test_fit.mse);
            c.test_r2 = test_fit.r2;
            c.expression = to_expression(elite_->genotype, ctx_.opset);
        }
        rec_.checkpoints.push_back(std::move(c));
    }
}

namespace {

// fresh evaluated individuals; stops evaluating when the budget runs dry
std::vector<Individual> init_individuals(int n, const EvolutionContext& ctx, EvalBudget& budget,
                                         Rng& rng, RunMonitor& monitor, PopulationState& pop,
                                         int skip_slot = -1) {
    std::vector<Individual> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<size_t>(i)].genotype = random_init(ctx.tmpl, ctx.opset, rng);
    for (int i = 0; i < n; ++i) {
        if (i == skip_slot) continue;
        auto& ind = out[static_cast<size_t>(i)];
        if (budget.exhausted()) break;
        ind.fit = fitness(ind.genotype, ctx.opset, ctx.train, budget);
        pop.observe(ind);
        monitor.observe(ind);
    }
    return out;
}

} // namespace

void generation(PopulationState& pop, const EvolutionContext& ctx, EvalBudget& budget, Rng& rng,
                RunMonitor& monitor) {
    if (pop.individuals.empty() || budget.exhausted()) return;

    std::vector<Genotype> genotypes;
    genotypes.reserve(pop.individuals.size());
    for (const auto& ind : pop.individuals) genotypes.push_back(ind.genotype);
    const LinkageTree fos = learn_linkage(genotypes, ctx.opset, rng);

    const size_t n = pop.individuals.size();
    for (size_t i = 0; i < n; ++i) {
        if (budget.exhausted()) break; // partial generation stands as-is
        Individual& ind = pop.individuals[i];

        bool improved = gom(ind, fos, pop.individuals, ctx.opset, ctx.train, budget, rng);
        if (ctx.cfg.ssi_enabled && !budget.exhausted())
            improved |= ssi(ind, pop.individuals, ctx.opset, ctx.train, budget, rng);
        if (ctx.cfg.gcs && !budget.exhausted())
            improved |= gcs(ind, *ctx.cfg.gcs, ctx.opset, ctx.train, budget);

        if (!improved && n >= 4 && !budget.exhausted()) {
            // tournament of 4: the individual plus three distinct rivals
            size_t rivals[3];
            for (int r = 0; r < 3; ++r) {
                size_t pick;
                bool fresh;
                do {
                    pick = static_cast<size_t>(rng.next_below(n));
                    fresh = pick != i;
                    for (int q = 0; q < r && fresh; ++q) fresh = pick != rivals[q];
                } while (!fresh);
                rivals[r] = pick;
            }
            size_t winner = i;
            for (size_t pick : rivals)
                if (pop.individuals[pick].fit.mse < pop.individuals[winner].fit.mse) winner = pick;
            if (winner != i) ind = pop.individuals[winner];
        }

        pop.observe(ind);
        monitor.observe(ind);
    }
    ++pop.generation;
}

bool converged(const PopulationState& pop, double fraction, double eps) {
    const size_t n = pop.individuals.size();
    if (n == 0) return false;
    std::vector<double> mses(n);
    for (size_t i = 0; i < n; ++i) mses[i] = pop.individuals[i].fit.mse;
    std::sort(mses.begin(), mses.end());
    const size_t w = static_cast<size_t>(
        std::ceil(fraction * static_cast<double>(n)));
    const double lo = mses[n - w];
    const double hi = mses[n - 1];
    if (std::isinf(lo)) return true; // the whole band sits at the worst sentinel
    if (std::isinf(hi)) return false;
    return hi - lo <= eps * std::max(1.0, std::abs(hi));
}

void restart(PopulationState& pop, const EvolutionContext& ctx, EvalBudget& budget, Rng& rng,
             RunMonitor& monitor) {
    if (pop.elite) pop.elite_archive.push_back(*pop.elite);
    int slot = -1;
    size_t pick = 0;
    if (!pop.elite_archive.empty() && pop.size > 0) {
        slot = static_cast<int>(rng.next_below(static_cast<uint64_t>(pop.size)));
        pick = static_cast<size_t>(rng.next_below(pop.elite_archive.size()));
    }
    pop.individuals = init_individuals(pop.size, ctx, budget, rng, monitor, pop, slot);
    pop.generation = 0;
    if (slot >= 0) pop.individuals[static_cast<size_t>(slot)] = pop.elite_archive[pick];
}

namespace {

struct ImsScheduler {
    const EvolutionContext& ctx;
    EvalBudget& budget;
    RunMonitor& monitor;
    RunRecord& rec;
    uint64_t seed;
    int base_population;

    std::vector<PopulationState> populations;
    std::vector<Rng> streams;
    std::vector<uint64_t> steps_done;

    void create_population(size_t level) {
        PopulationState pop;
        pop.size = base_population << level;
        streams.emplace_back(Rng::derive_seed(seed, level));
        populations.push_back(std::move(pop));
        steps_done.push_back(0);
        auto& p = populations[level];
        p.individuals = init_individuals(p.size, ctx, budget, streams[level], monitor, p);
        rec.population_sizes.push_back(p.size);
    }

    // terminate any population dominated by a larger, fitter one
    void update_terminations() {
        for (size_t i = 0; i < populations.size(); ++i) {
            if (populations[i].terminated) continue;
            for (size_t j = i + 1; j < populations.size(); ++j) {
                if (populations[j].terminated) continue;
                if (populations[j].mean_mse() < populations[i].mean_mse()) {
                    populations[i].terminated = true;
                    break;
                }
            }
        }
    }

    void step(size_t level) {
        if (budget.exhausted()) return;
        if (level == populations.size()) create_population(level);
        PopulationState& pop = populations[level];
        if (pop.terminated) {
            step(level + 1); // pass the turn to the next scale
            return;
        }
        const uint64_t fes_before = budget.used();
        generation(pop, ctx, budget, streams[level], monitor);
        ++steps_done[level];
        // a converged (or fully stalled) population restarts with an elite seed
        if (!budget.exhausted() && (converged(pop) || budget.used() == fes_before))
            restart(pop, ctx, budget, streams[level], monitor);
        update_terminations();
        if (steps_done[level] % kImsInterleavePeriod == 0) step(level + 1);
    }
};

} // namespace

RunRecord run_ims(const VariantConfig& cfg, const TreeTemplate& tmpl, const OperatorSet& opset,
                  const Dataset& train, const Dataset& test, EvalBudget& budget, uint64_t seed,
                  int base_population) {
    RunRecord rec;
    rec.config = cfg.label();
    rec.problem = train.name;
    rec.depth = tmpl.depth;
    rec.seed = seed;
    rec.budget = budget.cap();

    const EvolutionContext ctx{cfg, opset, tmpl, train, test};
    RunMonitor monitor(ctx, budget, rec);
    ImsScheduler scheduler{ctx, budget, monitor, rec, seed, base_population, {}, {}, {}};
    while (!budget.exhausted()) scheduler.step(0);
    monitor.flush_checkpoints();
    rec.total_fes = budget.used();
    return rec;
}

} // namespace gpg
