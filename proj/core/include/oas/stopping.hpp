#pragma once

// Observation-domain stopping rules.
//
// A target on the posterior MSE is converted, per observation count k,
// into magnitude thresholds on the running observation average
// |average| = |s| / k. The posterior MSE profile over the average is
// single-peaked for the supported priors, so "MSE <= target" becomes at
// most two comparisons: stop when the average is small enough (the
// component is resolved as off) or large enough (resolved as on).

#include <iosfwd>
#include <vector>

#include "oas/posterior.hpp"
#include "oas/source_model.hpp"

namespace oas {

enum class ThresholdKind {
    AlwaysStop,  // the whole profile is at or below the target
    NeverStop,   // the profile never reaches the target
    TwoSided,    // stop iff |average| <= tau_lo or |average| >= tau_hi
};

struct ThresholdEntry {
    ThresholdKind kind = ThresholdKind::NeverStop;
    double tau_lo = 0.0;  // valid when has_lower
    double tau_hi = 0.0;  // valid when has_upper
    bool has_lower = false;
    bool has_upper = false;
};

class StoppingThresholds {
public:
    // Builds the per-k table for k in [1, k_max]. Throws StructuralError
    // if any profile is not single-peaked (or, for the binary source with
    // p != 1/2, not symmetric in the average), since the two-comparison
    // form cannot represent such rules.
    static StoppingThresholds compute(const SourceModel& model, double sigma2,
                                      double target_mse, int k_max);

    // Table depth that comfortably covers typical schedules: four times
    // the rounded-up average slots per component at this operating point.
    static int default_k_max(int oversampling, double compression_ratio);

    int k_max() const { return static_cast<int>(entries_.size()); }
    double target_mse() const { return target_mse_; }
    double sigma2() const { return sigma2_; }

    // k must be in [1, k_max]; throws std::out_of_range otherwise.
    const ThresholdEntry& entry(int k) const;

private:
    StoppingThresholds(std::vector<ThresholdEntry> entries, double sigma2, double target_mse)
        : entries_(std::move(entries)), sigma2_(sigma2), target_mse_(target_mse) {}

    std::vector<ThresholdEntry> entries_;
    double sigma2_;
    double target_mse_;
};

// Threshold-based replacement for comparing the posterior MSE against
// the target directly. Throws std::out_of_range when obs.count exceeds
// the table depth.
bool stop_decision(const StoppingThresholds& thresholds, const ObservationSummary& obs);

// CSV table: header `k,kind,tau_lo,tau_hi`. Absent sides of a two-sided
// entry print as 0 (lower) and inf (upper); always/never rows leave both
// fields empty.
void write_thresholds_csv(std::ostream& out, const StoppingThresholds& thresholds);

} // namespace oas
