#include "oas/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstring>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "oas/errors.hpp"
#include "oas/num_format.hpp"
#include "oas/posterior.hpp"
#include "oas/rng.hpp"

namespace oas {

namespace {

constexpr int kCalibrationTrials = 800;
constexpr double kCalibrationTolerance = 0.005;

// Compensated (Neumaier) summation in index order, so the reduction is
// identical no matter how trials were distributed over workers.
double ordered_total(const std::vector<double>& values) {
    double sum = 0.0;
    double correction = 0.0;
    for (const double v : values) {
        const double t = sum + v;
        correction += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    return sum + correction;
}

} // namespace

const char* policy_name(Policy policy) {
    switch (policy) {
    case Policy::WorstComponent:
        return "worst_component";
    case Policy::Asymptotic:
        return "asymptotic";
    case Policy::ParallelAsymptotic:
        return "parallel_asymptotic";
    case Policy::Orthogonal:
        return "orthogonal";
    }
    return "unknown";
}

Policy parse_policy(const std::string& name) {
    if (name == "worst_component") return Policy::WorstComponent;
    if (name == "asymptotic") return Policy::Asymptotic;
    if (name == "parallel_asymptotic") return Policy::ParallelAsymptotic;
    if (name == "orthogonal") return Policy::Orthogonal;
    throw ConfigError("unknown policy '" + name +
                      "' (expected worst_component, asymptotic, parallel_asymptotic, or "
                      "orthogonal)");
}

SourceModel ExperimentConfig::source() const {
    switch (source_kind) {
    case SourceKind::SparseGaussian:
        return SourceModel::sparse_gaussian(p);
    case SourceKind::Binary:
        return SourceModel::binary(p);
    }
    throw ConfigError("unknown source kind");
}

std::uint64_t cell_seed(std::uint64_t master_seed, Policy policy, double compression_ratio,
                        int oversampling) {
    const std::uint64_t policy_class = policy == Policy::Orthogonal ? 1 : 0;
    std::uint64_t ratio_bits;
    static_assert(sizeof(ratio_bits) == sizeof(compression_ratio));
    std::memcpy(&ratio_bits, &compression_ratio, sizeof(ratio_bits));
    return rng::derive_seed(master_seed,
                            {policy_class, ratio_bits,
                             static_cast<std::uint64_t>(oversampling)});
}

CellPlan plan_cell(const ExperimentConfig& config, Policy policy, double compression_ratio,
                   int oversampling) {
    const SourceModel model = config.source();
    const int effective_m = policy == Policy::Orthogonal ? 1 : oversampling;

    CellPlan plan{model};
    plan.policy = policy;
    plan.compression_ratio = compression_ratio;
    plan.oversampling = effective_m;
    plan.n_components = config.n_components;
    plan.esn0_db = config.esn0_db;
    plan.cell_seed = cell_seed(config.master_seed, policy, compression_ratio, effective_m);

    if (policy == Policy::Orthogonal) {
        orthogonal_sigma2(model, compression_ratio, config.esn0_db);  // validate early
        return plan;
    }

    plan.budget = BudgetModel::from_snr(model, config.n_components, compression_ratio,
                                        oversampling, config.esn0_db);
    if (policy == Policy::Asymptotic || policy == Policy::ParallelAsymptotic) {
        if (policy == Policy::ParallelAsymptotic) plan.n_sensors = config.k_sensors;
        const CalibrationResult calibration = calibrate_target_mse(
            model, plan.budget, kCalibrationTrials,
            rng::derive_seed(plan.cell_seed, {rng::fnv1a("calibration")}),
            kCalibrationTolerance);
        plan.target_mse = calibration.target_mse;
        plan.thresholds = std::make_shared<StoppingThresholds>(StoppingThresholds::compute(
            model, plan.budget.sigma2_per_slot, calibration.target_mse,
            StoppingThresholds::default_k_max(oversampling, compression_ratio)));
    }
    return plan;
}

TrialResult run_trial(const CellPlan& plan, int trial, bool record_trace) {
    const auto trial_id = static_cast<std::uint64_t>(trial);
    const std::uint64_t truth_seed =
        rng::derive_seed(plan.cell_seed, {trial_id, rng::kTruthTag});
    const std::uint64_t noise_seed =
        rng::derive_seed(plan.cell_seed, {trial_id, rng::kNoiseTag});
    const std::vector<double> truth =
        sample_source(plan.model, plan.n_components, truth_seed);

    TrialResult out;
    if (plan.policy == Policy::Orthogonal) {
        const OrthogonalConfig cfg{plan.model, plan.n_components, plan.compression_ratio,
                                   plan.esn0_db};
        out.squared_errors = orthogonal_trial(cfg, truth, noise_seed);
        out.slots_used = plan.n_components;  // one look per component
        return out;
    }

    ScheduleTrace run;
    if (plan.policy == Policy::WorstComponent) {
        run = worst_component_run(plan.model, plan.budget, truth, noise_seed,
                                  RunOptions{record_trace});
    } else {
        // Run to threshold: the calibrated target pins the average slot
        // usage to the budget, individual trials run over or under it.
        AsymptoticOptions options;
        options.record_slots = record_trace;
        options.stop_when_targets_met = true;
        options.thresholds = plan.thresholds.get();
        run = parallel_asymptotic_run(plan.model, plan.budget, plan.n_sensors,
                                      plan.target_mse, truth, noise_seed, options);
    }

    out.slots_used = run.slots_used;
    out.squared_errors.resize(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const ComponentState& st = run.components[i];
        const double r = st.count >= 1
                             ? reconstruct(plan.model, ObservationSummary{st.sum, st.count},
                                           plan.budget.sigma2_per_slot)
                             : plan.model.prior_mean();
        out.squared_errors[i] = (r - truth[i]) * (r - truth[i]);
    }
    out.trace = std::move(run);
    return out;
}

namespace {

CellResult run_cell(const ExperimentConfig& config, Policy policy, double compression_ratio,
                    int oversampling, int workers) {
    const int effective_m = policy == Policy::Orthogonal ? 1 : oversampling;
    CellResult result;
    result.policy = policy;
    result.compression_ratio = compression_ratio;
    result.oversampling = effective_m;
    result.trials = config.trials;
    result.seed = cell_seed(config.master_seed, policy, compression_ratio, effective_m);

    // Cells the sweep cannot evaluate stay in the grid as skipped rows.
    if (policy == Policy::Orthogonal) {
        if (compression_ratio < 1.0) return result;
    } else {
        const long long total_slots = std::llround(
            static_cast<double>(oversampling) * config.n_components / compression_ratio);
        if (total_slots < config.n_components) return result;
    }

    std::optional<CellPlan> plan;
    try {
        plan.emplace(plan_cell(config, policy, compression_ratio, oversampling));
    } catch (const CalibrationError&) {
        return result;
    } catch (const StructuralError&) {
        return result;
    }

    const int trials = config.trials;
    std::vector<double> trial_means(static_cast<std::size_t>(trials));
    std::vector<double> trial_slots(static_cast<std::size_t>(trials));

    const unsigned hardware = std::thread::hardware_concurrency();
    int n_workers = workers > 0 ? workers : (hardware > 0 ? static_cast<int>(hardware) : 1);
    n_workers = std::clamp(n_workers, 1, trials);

    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(n_workers));
    const int base = trials / n_workers;
    const int extra = trials % n_workers;
    int begin = 0;
    for (int w = 0; w < n_workers; ++w) {
        const int end = begin + base + (w < extra ? 1 : 0);
        pool.emplace_back([&, begin, end, w] {
            try {
                for (int t = begin; t < end; ++t) {
                    const TrialResult trial = run_trial(*plan, t);
                    double sum = 0.0;
                    for (const double e : trial.squared_errors) sum += e;
                    trial_means[static_cast<std::size_t>(t)] =
                        sum / static_cast<double>(plan->n_components);
                    trial_slots[static_cast<std::size_t>(t)] =
                        static_cast<double>(trial.slots_used);
                }
            } catch (...) {
                failures[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
        begin = end;
    }
    for (std::thread& worker : pool) worker.join();
    for (const std::exception_ptr& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }

    result.mse = ordered_total(trial_means) / trials;
    if (trials > 1) {
        std::vector<double> squared(static_cast<std::size_t>(trials));
        for (std::size_t t = 0; t < squared.size(); ++t) {
            const double d = trial_means[t] - result.mse;
            squared[t] = d * d;
        }
        const double sample_variance = ordered_total(squared) / (trials - 1);
        result.std_error = std::sqrt(sample_variance / trials);
    }
    result.slots_per_component =
        ordered_total(trial_slots) / trials / plan->n_components;
    result.ok = true;
    return result;
}

} // namespace

std::vector<CellResult> run_sweep(const ExperimentConfig& config, int workers) {
    if (config.trials < 1) {
        throw ConfigError("sweep needs trials >= 1, got " + std::to_string(config.trials));
    }
    if (config.n_components < 1) {
        throw ConfigError("sweep needs n_components >= 1, got " +
                          std::to_string(config.n_components));
    }
    if (workers < 0) {
        throw ConfigError("worker count must be >= 0, got " + std::to_string(workers));
    }
    config.source();  // validate the (kind, p) combination up front
    for (const Policy policy : config.policies) {
        if (policy == Policy::ParallelAsymptotic &&
            (config.k_sensors < 1 || config.k_sensors > config.n_components)) {
            throw ConfigError("k_sensors must be in [1, " +
                              std::to_string(config.n_components) + "], got " +
                              std::to_string(config.k_sensors));
        }
    }

    std::vector<CellResult> results;
    for (const Policy policy : config.policies) {
        for (const double c : config.compression_ratios) {
            if (policy == Policy::Orthogonal) {
                results.push_back(run_cell(config, policy, c, 1, workers));
                continue;
            }
            for (const int m : config.oversampling_factors) {
                results.push_back(run_cell(config, policy, c, m, workers));
            }
        }
    }
    return results;
}

} // namespace oas
