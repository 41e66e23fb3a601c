#pragma once

// Deterministic Monte-Carlo experiment engine.
//
// A sweep is a grid of cells (policy, compression ratio, oversampling
// factor). Every trial's random streams derive only from ids (master
// seed, cell, trial index, purpose), never from execution order, so
// results are identical for any worker count. OAS policies at the same
// (c, M) cell share truth streams, which pairs their comparisons.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "oas/baseline.hpp"
#include "oas/scheduler.hpp"
#include "oas/source_model.hpp"
#include "oas/stopping.hpp"

namespace oas {

enum class Policy {
    WorstComponent,
    Asymptotic,
    ParallelAsymptotic,
    Orthogonal,
};

const char* policy_name(Policy policy);
Policy parse_policy(const std::string& name);

struct ExperimentConfig {
    SourceKind source_kind = SourceKind::SparseGaussian;
    double p = 0.9;
    double esn0_db = 10.0;
    int n_components = 100;
    std::vector<double> compression_ratios = {1.0, 1.5, 2.0, 2.5, 3.0, 4.0};
    std::vector<int> oversampling_factors = {4, 16};
    std::vector<Policy> policies = {Policy::WorstComponent, Policy::Asymptotic,
                                    Policy::Orthogonal};
    int trials = 10000;
    std::uint64_t master_seed = 1;
    int k_sensors = 4;  // parallel_asymptotic only

    SourceModel source() const;
};

// Everything needed to run one cell trial by trial.
struct CellPlan {
    SourceModel model;
    Policy policy = Policy::WorstComponent;
    double compression_ratio = 1.0;
    int oversampling = 1;
    int n_components = 0;
    int n_sensors = 1;
    double esn0_db = 0.0;
    std::uint64_t cell_seed = 0;
    BudgetModel budget = {};  // OAS policies only
    double target_mse = 0.0;  // asymptotic rules only
    std::shared_ptr<const StoppingThresholds> thresholds = {};  // asymptotic rules only
};

// Stream id for one cell: OAS policies share one id class so their
// truths pair up; the orthogonal baseline gets its own.
std::uint64_t cell_seed(std::uint64_t master_seed, Policy policy, double compression_ratio,
                        int oversampling);

// Builds the plan for a feasible cell. Asymptotic cells calibrate their
// target so the mean slot usage matches the budget, then precompute the
// matching threshold table; CalibrationError propagates when the budget
// cannot be matched.
CellPlan plan_cell(const ExperimentConfig& config, Policy policy, double compression_ratio,
                   int oversampling);

struct TrialResult {
    std::vector<double> squared_errors;  // one per component
    long long slots_used = 0;
    ScheduleTrace trace;  // slot records only when requested; empty for orthogonal
};

TrialResult run_trial(const CellPlan& plan, int trial, bool record_trace = false);

struct CellResult {
    Policy policy = Policy::WorstComponent;
    double compression_ratio = 1.0;
    int oversampling = 1;  // reported as 1 for the orthogonal baseline
    bool ok = false;       // false: infeasible or uncalibratable, row is skipped
    double mse = 0.0;
    double std_error = 0.0;
    double slots_per_component = 0.0;
    int trials = 0;
    std::uint64_t seed = 0;
};

// Runs every cell of the grid. Infeasible cells (fewer slots than
// components) and cells whose calibration fails come back with ok=false
// instead of aborting the sweep. workers = 0 uses the hardware thread
// count; results do not depend on it.
std::vector<CellResult> run_sweep(const ExperimentConfig& config, int workers = 0);

} // namespace oas
