#pragma once

// Adaptive measurement scheduling across N components under a shared
// sub-slot budget.
//
// A nominal measurement slot is split into M sub-slots, each M times
// noisier; compressing the schedule by a factor c leaves round(M*N/c)
// sub-slots in total, which the policies below distribute one at a time:
//
//   - worst-component: after one look at everything, always measure the
//     component with the largest posterior MSE;
//   - asymptotic: measure a component repeatedly until its posterior MSE
//     falls below a target, then move to the next;
//   - parallel asymptotic: the same rule executed by K sensors in
//     lockstep, each holding one component until it reaches the target.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "oas/source_model.hpp"
#include "oas/stopping.hpp"

namespace oas {

struct BudgetModel {
    int n_components = 0;
    double compression_ratio = 0.0;
    int oversampling = 0;
    long long total_slots = 0;     // round(M * N / c)
    double sigma2_per_slot = 0.0;  // noise variance of one sub-slot look

    // Budget at an Es/N0 operating point (dB); the per-sub-slot noise
    // variance is M * average_power / (Es/N0 linear).
    static BudgetModel from_snr(const SourceModel& model, int n_components,
                                double compression_ratio, int oversampling, double esn0_db);
    // Budget with the per-sub-slot noise variance given directly.
    static BudgetModel with_sigma2(int n_components, double compression_ratio,
                                   int oversampling, double sigma2);
};

struct ComponentState {
    int index = 0;
    double sum = 0.0;         // running observation sum
    std::int64_t count = 0;   // observations so far
    double mse = 0.0;         // posterior MSE at (sum, count)

    bool operator==(const ComponentState&) const = default;
};

// One measurement and the measured component's statistics right after it.
struct SlotRecord {
    std::int64_t slot = 0;  // 0-based global measurement index
    int component = 0;
    double observation = 0.0;
    double sum = 0.0;
    std::int64_t count = 0;
    double mse = 0.0;

    bool operator==(const SlotRecord&) const = default;
};

struct ScheduleTrace {
    std::vector<SlotRecord> slots;  // filled only when recording is requested
    std::int64_t slots_used = 0;
    std::vector<ComponentState> components;

    bool operator==(const ScheduleTrace&) const = default;
};

struct RunOptions {
    bool record_slots = false;
};

struct AsymptoticOptions {
    bool record_slots = false;
    // Finish once every component meets the stop rule instead of spending
    // the whole budget on the worst remaining components.
    bool stop_when_targets_met = false;
    // Optional precomputed stop rule; null compares the posterior MSE
    // against the target directly. Counts beyond the table's k_max fall
    // back to the direct comparison.
    const StoppingThresholds* thresholds = nullptr;
    // Hard measurement cap; -1 means the budget's total_slots (no cap at
    // all when stop_when_targets_met is set).
    long long slot_limit = -1;
};

ScheduleTrace worst_component_run(const SourceModel& model, const BudgetModel& budget,
                                  std::span<const double> truth, std::uint64_t seed,
                                  const RunOptions& options = {});

ScheduleTrace asymptotic_run(const SourceModel& model, const BudgetModel& budget,
                             double target_mse, std::span<const double> truth,
                             std::uint64_t seed, const AsymptoticOptions& options = {});

ScheduleTrace parallel_asymptotic_run(const SourceModel& model, const BudgetModel& budget,
                                      int n_sensors, double target_mse,
                                      std::span<const double> truth, std::uint64_t seed,
                                      const AsymptoticOptions& options = {});

struct CalibrationResult {
    double target_mse = 0.0;  // target whose mean slot usage matches the budget
    double mean_slots = 0.0;  // Monte-Carlo mean at that target
    int iterations = 0;       // bisection steps taken
};

// Inverts "target MSE -> average slots used" for the single-sensor
// asymptotic rule: finds the target at which the mean slots consumed,
// over `trials` runs to threshold with unlimited budget, matches
// budget.total_slots to the given relative tolerance. Log-domain
// bisection over [1e-6, prior variance]; the same trial streams are
// replayed for every candidate so the map stays monotone.
CalibrationResult calibrate_target_mse(const SourceModel& model, const BudgetModel& budget,
                                       int trials, std::uint64_t seed, double tolerance);

// Line-oriented trace dump: header `m,n_m,y_m,s,k,mse`, one row per
// recorded measurement.
void write_trace(std::ostream& out, const ScheduleTrace& trace);

} // namespace oas
