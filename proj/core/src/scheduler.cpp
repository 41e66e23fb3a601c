#include "oas/scheduler.hpp"

#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "oas/errors.hpp"
#include "oas/num_format.hpp"
#include "oas/posterior.hpp"
#include "oas/rng.hpp"

namespace oas {

namespace {

void check_budget_shape(int n_components, double compression_ratio, int oversampling) {
    if (n_components < 1) {
        throw ConfigError("component count must be >= 1, got " +
                          std::to_string(n_components));
    }
    if (!(compression_ratio > 0.0)) {
        throw ConfigError("compression ratio must be positive, got " +
                          format_number(compression_ratio));
    }
    if (oversampling < 1) {
        throw ConfigError("oversampling factor must be >= 1, got " +
                          std::to_string(oversampling));
    }
}

void check_truth(const BudgetModel& budget, std::span<const double> truth) {
    if (static_cast<int>(truth.size()) != budget.n_components) {
        throw ConfigError("truth vector has " + std::to_string(truth.size()) +
                          " components, budget expects " +
                          std::to_string(budget.n_components));
    }
}

// Shared measurement bookkeeping: draws noise in measurement order from
// one stream and keeps per-component sufficient statistics current.
struct Engine {
    const SourceModel& model;
    double sigma2;
    double noise_sd;
    std::span<const double> truth;
    rng::Pcg32 gen;
    bool record;
    ScheduleTrace trace;

    Engine(const SourceModel& model_in, const BudgetModel& budget,
           std::span<const double> truth_in, std::uint64_t seed, bool record_in)
        : model(model_in),
          sigma2(budget.sigma2_per_slot),
          noise_sd(std::sqrt(budget.sigma2_per_slot)),
          truth(truth_in),
          gen(rng::make_stream(seed)),
          record(record_in) {
        trace.components.resize(truth.size());
        for (std::size_t i = 0; i < truth.size(); ++i) {
            trace.components[i] =
                ComponentState{static_cast<int>(i), 0.0, 0, model.prior_variance()};
        }
    }

    void measure(int component) {
        const double y = truth[static_cast<std::size_t>(component)] + noise_sd * gen.next_gaussian();
        ComponentState& st = trace.components[static_cast<std::size_t>(component)];
        st.sum += y;
        st.count += 1;
        st.mse = posterior_mse(model, ObservationSummary{st.sum, st.count}, sigma2);
        const std::int64_t slot = trace.slots_used++;
        if (record) trace.slots.push_back({slot, component, y, st.sum, st.count, st.mse});
    }
};

} // namespace

BudgetModel BudgetModel::with_sigma2(int n_components, double compression_ratio,
                                     int oversampling, double sigma2) {
    check_budget_shape(n_components, compression_ratio, oversampling);
    if (!(sigma2 > 0.0)) {
        throw ConfigError("per-slot noise variance must be positive, got " +
                          format_number(sigma2));
    }
    BudgetModel budget;
    budget.n_components = n_components;
    budget.compression_ratio = compression_ratio;
    budget.oversampling = oversampling;
    budget.total_slots =
        std::llround(static_cast<double>(oversampling) * n_components / compression_ratio);
    budget.sigma2_per_slot = sigma2;
    if (budget.total_slots < n_components) {
        throw ConfigError("infeasible budget: oversampling factor M=" +
                          std::to_string(oversampling) + " is below compression ratio c=" +
                          format_number(compression_ratio) +
                          ", leaving fewer slots than components");
    }
    return budget;
}

BudgetModel BudgetModel::from_snr(const SourceModel& model, int n_components,
                                  double compression_ratio, int oversampling,
                                  double esn0_db) {
    const double snr = std::pow(10.0, esn0_db / 10.0);
    return with_sigma2(n_components, compression_ratio, oversampling,
                       oversampling * model.average_power() / snr);
}

ScheduleTrace worst_component_run(const SourceModel& model, const BudgetModel& budget,
                                  std::span<const double> truth, std::uint64_t seed,
                                  const RunOptions& options) {
    check_truth(budget, truth);
    Engine engine(model, budget, truth, seed, options.record_slots);
    const int n = budget.n_components;
    for (int i = 0; i < n && engine.trace.slots_used < budget.total_slots; ++i) {
        engine.measure(i);
    }
    const std::vector<ComponentState>& comps = engine.trace.components;
    while (engine.trace.slots_used < budget.total_slots) {
        int worst = 0;
        for (int i = 1; i < n; ++i) {
            if (comps[static_cast<std::size_t>(i)].mse >
                comps[static_cast<std::size_t>(worst)].mse) {
                worst = i;
            }
        }
        engine.measure(worst);
    }
    return std::move(engine.trace);
}

ScheduleTrace asymptotic_run(const SourceModel& model, const BudgetModel& budget,
                             double target_mse, std::span<const double> truth,
                             std::uint64_t seed, const AsymptoticOptions& options) {
    return parallel_asymptotic_run(model, budget, 1, target_mse, truth, seed, options);
}

ScheduleTrace parallel_asymptotic_run(const SourceModel& model, const BudgetModel& budget,
                                      int n_sensors, double target_mse,
                                      std::span<const double> truth, std::uint64_t seed,
                                      const AsymptoticOptions& options) {
    check_truth(budget, truth);
    if (n_sensors < 1 || n_sensors > budget.n_components) {
        throw ConfigError("sensor count must be in [1, " +
                          std::to_string(budget.n_components) + "], got " +
                          std::to_string(n_sensors));
    }
    if (!(target_mse > 0.0)) {
        throw ConfigError("target mse must be positive, got " + format_number(target_mse));
    }

    long long limit = -1;  // -1: unlimited
    if (options.slot_limit >= 0) {
        limit = options.slot_limit;
    } else if (!options.stop_when_targets_met) {
        limit = budget.total_slots;
    }

    Engine engine(model, budget, truth, seed, options.record_slots);
    std::vector<ComponentState>& comps = engine.trace.components;
    const int n = budget.n_components;

    const auto met_target = [&](const ComponentState& st) {
        if (st.count == 0) return false;  // nothing observed yet
        if (options.thresholds != nullptr && st.count <= options.thresholds->k_max()) {
            return stop_decision(*options.thresholds, ObservationSummary{st.sum, st.count});
        }
        return st.mse <= target_mse;
    };

    std::vector<int> assigned(static_cast<std::size_t>(n_sensors), -1);
    std::vector<char> held(static_cast<std::size_t>(n), 0);     // a sensor is on it now
    std::vector<char> finished(static_cast<std::size_t>(n), 0); // has met the rule once
    int n_finished = 0;

    while (true) {
        if (options.stop_when_targets_met && n_finished == n) break;
        if (limit >= 0 && engine.trace.slots_used >= limit) break;

        // Hand every free sensor a component: the lowest-index one never
        // measured, otherwise the one with the largest current mse. In the
        // termination phase several sensors can share a component, and in
        // budget mode this is also what soaks up any surplus slots.
        for (int s = 0; s < n_sensors; ++s) {
            if (assigned[static_cast<std::size_t>(s)] != -1) continue;
            int pick = -1;
            for (int i = 0; i < n; ++i) {
                if (comps[static_cast<std::size_t>(i)].count == 0 &&
                    !held[static_cast<std::size_t>(i)]) {
                    pick = i;
                    break;
                }
            }
            if (pick == -1) {
                for (int i = 0; i < n; ++i) {
                    if (pick == -1 || comps[static_cast<std::size_t>(i)].mse >
                                          comps[static_cast<std::size_t>(pick)].mse) {
                        pick = i;
                    }
                }
            }
            assigned[static_cast<std::size_t>(s)] = pick;
            held[static_cast<std::size_t>(pick)] = 1;
        }

        // One lockstep slot: every busy sensor measures once, in sensor
        // order. The budget can run out mid-step.
        bool fired = false;
        for (int s = 0; s < n_sensors; ++s) {
            const int component = assigned[static_cast<std::size_t>(s)];
            if (component == -1) continue;
            if (limit >= 0 && engine.trace.slots_used >= limit) break;
            engine.measure(component);
            fired = true;
        }
        if (!fired) break;

        // Release sensors whose component now meets the rule; they pick
        // up new work at the top of the next step. Once everything has
        // finished (surplus burning in budget mode) release every step,
        // so each slot goes to the then-current worst component.
        for (int s = 0; s < n_sensors; ++s) {
            const int component = assigned[static_cast<std::size_t>(s)];
            if (component == -1) continue;
            if (met_target(comps[static_cast<std::size_t>(component)]) || n_finished == n) {
                if (!finished[static_cast<std::size_t>(component)]) {
                    finished[static_cast<std::size_t>(component)] = 1;
                    ++n_finished;
                }
                held[static_cast<std::size_t>(component)] = 0;
                assigned[static_cast<std::size_t>(s)] = -1;
            }
        }
    }
    return std::move(engine.trace);
}

CalibrationResult calibrate_target_mse(const SourceModel& model, const BudgetModel& budget,
                                       int trials, std::uint64_t seed, double tolerance) {
    if (trials < 100) {
        throw ConfigError("calibration needs at least 100 trials, got " +
                          std::to_string(trials));
    }
    if (tolerance < 0.0) {
        throw ConfigError("calibration tolerance must be nonnegative, got " +
                          format_number(tolerance));
    }

    const double budget_mean = static_cast<double>(budget.total_slots);
    // Once the running slot total crosses this line the candidate target
    // is too strict no matter how the remaining trials turn out, so each
    // evaluation is cut off there instead of running stringent targets to
    // completion.
    const double abort_sum = budget_mean * trials * (1.0 + tolerance);

    struct Evaluation {
        bool overshot;
        double mean;
    };
    const auto mean_slots = [&](double target) -> Evaluation {
        long long total = 0;
        AsymptoticOptions options;
        options.stop_when_targets_met = true;
        for (int t = 0; t < trials; ++t) {
            const auto trial = static_cast<std::uint64_t>(t);
            const std::vector<double> truth = sample_source(
                model, budget.n_components, rng::derive_seed(seed, {trial, rng::kTruthTag}));
            options.slot_limit = static_cast<long long>(abort_sum) - total + 1;
            const ScheduleTrace run =
                parallel_asymptotic_run(model, budget, 1, target, truth,
                                        rng::derive_seed(seed, {trial, rng::kNoiseTag}), options);
            total += run.slots_used;
            if (static_cast<double>(total) > abort_sum) return {true, 0.0};
        }
        return {false, static_cast<double>(total) / trials};
    };
    const auto within_tolerance = [&](double mean) {
        return std::abs(mean - budget_mean) <= tolerance * budget_mean;
    };

    double lo = 1e-6;
    double hi = model.prior_variance();
    const Evaluation at_lo = mean_slots(lo);
    if (!at_lo.overshot && within_tolerance(at_lo.mean)) return {lo, at_lo.mean, 0};
    if (!at_lo.overshot && at_lo.mean <= budget_mean) {
        throw CalibrationError("budget not bracketed: even at target mse " +
                               format_number(lo) + " the mean slot usage " +
                               format_number(at_lo.mean) + " does not exceed the budget " +
                               format_number(budget_mean));
    }
    const Evaluation at_hi = mean_slots(hi);
    if (!at_hi.overshot && within_tolerance(at_hi.mean)) return {hi, at_hi.mean, 0};
    if (at_hi.overshot || at_hi.mean > budget_mean) {
        throw CalibrationError("budget not bracketed: at target mse " + format_number(hi) +
                               " (the prior variance) the mean slot usage still exceeds "
                               "the budget " +
                               format_number(budget_mean));
    }

    for (int iteration = 1; iteration <= 200; ++iteration) {
        const double mid = std::sqrt(lo * hi);
        const Evaluation at_mid = mean_slots(mid);
        if (!at_mid.overshot && within_tolerance(at_mid.mean)) {
            return {mid, at_mid.mean, iteration};
        }
        if (at_mid.overshot || at_mid.mean > budget_mean) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    throw CalibrationError("calibration did not converge in 200 bisections (tolerance " +
                           format_number(tolerance) + ", final interval [" +
                           format_number(lo) + ", " + format_number(hi) + "])");
}

void write_trace(std::ostream& out, const ScheduleTrace& trace) {
    out << "m,n_m,y_m,s,k,mse\n";
    for (const SlotRecord& rec : trace.slots) {
        out << rec.slot << ',' << rec.component << ',' << format_number(rec.observation)
            << ',' << format_number(rec.sum) << ',' << rec.count << ','
            << format_number(rec.mse) << '\n';
    }
}

} // namespace oas
