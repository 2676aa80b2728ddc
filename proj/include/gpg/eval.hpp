#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "gpg/tree.hpp"

namespace gpg {

// Numeric table with typed columns, stored column-major. Boolean columns
// contain only {0,1}.
struct Dataset {
    std::string name;
    std::vector<std::vector<double>> columns; // n_vars columns of n_rows each
    std::vector<ValueType> var_types;
    std::vector<double> y;

    size_t rows() const { return y.size(); }
    size_t vars() const { return columns.size(); }
};

constexpr double kWorstMse = std::numeric_limits<double>::infinity();
constexpr double kR2Floor = -1e15;

struct FitnessRecord {
    double mse = kWorstMse;
    double r2 = kR2Floor;

    bool not_worse_than(const FitnessRecord& other) const { return mse <= other.mse; }
    bool better_than(const FitnessRecord& other) const { return mse < other.mse; }
};

// Counters relied on by the monotonicity audit: every accept decision in
// GOM/SSI/GCS bumps `events`; committing a strictly worse fitness would bump
// `violations` (must stay 0). The per-phase evaluation tallies expose which
// code path spent the budget. When set, `on_event` sees the genotype right
// after every accept/revert decision.
struct AuditCounters {
    uint64_t events = 0;
    uint64_t violations = 0;
    uint64_t gom_evals = 0;
    uint64_t ssi_evals = 0;
    uint64_t gcs_evals = 0;
    std::function<void(const Genotype&)> on_event;
};

// Global function-evaluation accounting for one run. Every fitness
// computation driving the search costs exactly one evaluation; test-set
// metrics at checkpoints are free.
class EvalBudget {
public:
    EvalBudget(uint64_t cap, std::vector<uint64_t> checkpoints)
        : cap_(cap), checkpoints_(std::move(checkpoints)) {}

    uint64_t used() const { return used_; }
    uint64_t cap() const { return cap_; }
    bool exhausted() const { return used_ >= cap_; }
    const std::vector<uint64_t>& checkpoints() const { return checkpoints_; }

    void count_one() { ++used_; }

    bool checkpoint_due() const {
        return next_checkpoint_ < checkpoints_.size() && used_ >= checkpoints_[next_checkpoint_];
    }
    uint64_t pop_checkpoint() { return checkpoints_[next_checkpoint_++]; }

    AuditCounters audit;

private:
    uint64_t used_ = 0;
    uint64_t cap_ = 0;
    std::vector<uint64_t> checkpoints_;
    size_t next_checkpoint_ = 0;
};

// One pass per active node over all rows; introns are never touched.
std::vector<double> evaluate_tree(const Genotype& g, const OperatorSet& opset, const Dataset& d);

// residual metrics without budget accounting (checkpoints, reports)
FitnessRecord compute_metrics(const Genotype& g, const OperatorSet& opset, const Dataset& d);

// fitness for search: counts one function evaluation; non-finite MSE maps to
// the worst sentinel. Call only while the budget is not exhausted.
FitnessRecord fitness(const Genotype& g, const OperatorSet& opset, const Dataset& d,
                      EvalBudget& budget);

} // namespace gpg
