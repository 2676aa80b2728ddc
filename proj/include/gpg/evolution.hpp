#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gpg/eval.hpp"
#include "gpg/records.hpp"
#include "gpg/variation.hpp"

namespace gpg {

struct PopulationState {
    std::vector<Individual> individuals;
    int size = 0;
    int generation = 0;
    std::optional<Individual> elite;        // best ever seen in this lineage
    std::vector<Individual> elite_archive;  // one entry per converged epoch
    bool terminated = false;

    double mean_mse() const;
    void observe(const Individual& ind);  // elite update
};

// Everything a generation step needs besides the population itself.
struct EvolutionContext {
    const VariantConfig& cfg;
    const OperatorSet& opset;
    const TreeTemplate& tmpl;
    const Dataset& train;
    const Dataset& test;
};

// Hook driven after every fitness-bearing pipeline step so the run can track
// its global elite and flush checkpoint records promptly.
class RunMonitor {
public:
    RunMonitor(const EvolutionContext& ctx, EvalBudget& budget, RunRecord& rec)
        : ctx_(ctx), budget_(budget), rec_(rec) {}

    void observe(const Individual& ind);
    void flush_checkpoints();
    const std::optional<Individual>& elite() const { return elite_; }

private:
    const EvolutionContext& ctx_;
    EvalBudget& budget_;
    RunRecord& rec_;
    std::optional<Individual> elite_;
};

// One GOM(+SSI,+GCS) sweep over the population with the tournament-of-4
// fallback for individuals the pipeline did not strictly improve.
void generation(PopulationState& pop, const EvolutionContext& ctx, EvalBudget& budget, Rng& rng,
                RunMonitor& monitor);

// True when the spread of the worst ceil(fraction*size) fitnesses is within
// the (relative) margin.
bool converged(const PopulationState& pop, double fraction = 0.9, double eps = 1e-8);

// Fresh random population of the same size with one slot overwritten by a
// randomly chosen archived elite.
void restart(PopulationState& pop, const EvolutionContext& ctx, EvalBudget& budget, Rng& rng,
             RunMonitor& monitor);

constexpr int kImsBasePopulation = 64;
constexpr int kImsInterleavePeriod = 10;

// Interleaved multistart: population i+1 (double size, created on first
// touch) advances one step after every 10 generations of population i;
// converged populations restart, dominated populations are terminated.
RunRecord run_ims(const VariantConfig& cfg, const TreeTemplate& tmpl, const OperatorSet& opset,
                  const Dataset& train, const Dataset& test, EvalBudget& budget, uint64_t seed,
                  int base_population = kImsBasePopulation);

} // namespace gpg
