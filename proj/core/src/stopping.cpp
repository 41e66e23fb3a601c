#include "oas/stopping.hpp"

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "oas/errors.hpp"
#include "oas/num_format.hpp"

namespace oas {

namespace {

constexpr double kScanStep = 1e-2;
constexpr double kRootTol = 1e-10;
constexpr int kRootIters = 200;
constexpr int kMaxExtensions = 8;

// Posterior MSE as a function of the observation average at fixed count.
struct Profile {
    const SourceModel& model;
    double sigma2;
    std::int64_t k;

    double operator()(double avg) const {
        return posterior_mse(model, ObservationSummary{avg * static_cast<double>(k), k},
                             sigma2);
    }
};

double golden_max(const Profile& f, double a, double b) {
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - ratio * (b - a);
    double x2 = a + ratio * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int i = 0; i < kRootIters && (b - a) > kRootTol; ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

ThresholdEntry classify(const Profile& f, double target, double tail_limit) {
    // Grid scan from zero, doubling the range while the profile is still
    // rising at the far end.
    double end = 10.0 * std::sqrt(1.0 + f.sigma2);
    std::vector<double> values;
    for (int extension = 0;; ++extension) {
        const auto points = static_cast<std::size_t>(std::ceil(end / kScanStep)) + 1;
        values.resize(points);
        double max_abs = 0.0;
        for (std::size_t i = 0; i < points; ++i) {
            values[i] = f(static_cast<double>(i) * kScanStep);
            max_abs = std::max(max_abs, std::abs(values[i]));
        }
        const double tol = 1e-12 * max_abs;
        if (values[points - 1] - values[points - 2] <= tol) break;
        if (extension == kMaxExtensions) {
            throw StructuralError("posterior mse profile still rising at average " +
                                  format_number(end) + " after " +
                                  std::to_string(kMaxExtensions) + " range doublings");
        }
        end *= 2.0;
    }

    // The two-comparison rule requires a single-peaked profile: any slope
    // sign pattern other than rise-then-fall is structural.
    double max_abs = 0.0;
    for (const double v : values) max_abs = std::max(max_abs, std::abs(v));
    const double tol = 1e-12 * max_abs;
    bool past_peak = false;
    std::size_t peak_index = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double diff = values[i] - values[i - 1];
        if (diff > tol && past_peak) {
            throw StructuralError(
                "posterior mse profile rises again after falling near average " +
                format_number(static_cast<double>(i) * kScanStep) +
                "; two-threshold stopping is invalid for this prior");
        }
        if (diff < -tol) past_peak = true;
        if (values[i] > values[peak_index]) peak_index = i;
    }

    const double lo_bracket =
        peak_index == 0 ? 0.0 : static_cast<double>(peak_index - 1) * kScanStep;
    const double hi_bracket =
        std::min(end, static_cast<double>(peak_index + 1) * kScanStep);
    const double peak_x = golden_max(f, lo_bracket, hi_bracket);
    const double peak_value = std::max(f(peak_x), values[peak_index]);

    if (peak_value <= target) {
        ThresholdEntry entry;
        entry.kind = ThresholdKind::AlwaysStop;
        return entry;
    }

    ThresholdEntry entry;
    if (f(0.0) <= target) {
        // Rising flank: largest average still at or below the target.
        double lo = 0.0;
        double hi = peak_x;
        for (int i = 0; i < kRootIters && hi - lo > kRootTol; ++i) {
            const double mid = 0.5 * (lo + hi);
            (f(mid) <= target ? lo : hi) = mid;
        }
        entry.tau_lo = lo;
        entry.has_lower = true;
    }
    if (tail_limit < target) {
        // Falling flank: smallest average at or below the target.
        double far = std::max(end, peak_x + kScanStep);
        int guard = 0;
        while (f(far) > target) {
            far *= 2.0;
            if (++guard > kRootIters) {
                throw StructuralError("upper stopping threshold not reachable below average " +
                                      format_number(far));
            }
        }
        double lo = peak_x;
        double hi = far;
        for (int i = 0; i < kRootIters && hi - lo > kRootTol; ++i) {
            const double mid = 0.5 * (lo + hi);
            (f(mid) > target ? lo : hi) = mid;
        }
        entry.tau_hi = hi;
        entry.has_upper = true;
    }
    entry.kind = (entry.has_lower || entry.has_upper) ? ThresholdKind::TwoSided
                                                      : ThresholdKind::NeverStop;
    return entry;
}

} // namespace

StoppingThresholds StoppingThresholds::compute(const SourceModel& model, double sigma2,
                                               double target_mse, int k_max) {
    if (!(sigma2 > 0.0)) {
        throw ConfigError("threshold table needs positive noise variance, got " +
                          std::to_string(sigma2));
    }
    if (!(target_mse > 0.0)) {
        throw ConfigError("threshold table needs a positive target mse, got " +
                          std::to_string(target_mse));
    }
    if (k_max < 1) {
        throw ConfigError("threshold table needs k_max >= 1, got " + std::to_string(k_max));
    }
    if (model.kind() == SourceKind::Binary && model.p() != 0.5) {
        throw StructuralError(
            "binary source with p != 1/2 has its posterior mse peak away from a zero "
            "average; magnitude thresholds cannot represent its stopping rule");
    }

    std::vector<ThresholdEntry> entries;
    entries.reserve(static_cast<std::size_t>(k_max));
    for (int k = 1; k <= k_max; ++k) {
        const Profile profile{model, sigma2, k};
        const double tail_limit = model.kind() == SourceKind::SparseGaussian
                                      ? sigma2 / (static_cast<double>(k) + sigma2)
                                      : 0.0;
        entries.push_back(classify(profile, target_mse, tail_limit));
    }
    return StoppingThresholds(std::move(entries), sigma2, target_mse);
}

int StoppingThresholds::default_k_max(int oversampling, double compression_ratio) {
    if (oversampling < 1) {
        throw ConfigError("oversampling factor must be >= 1, got " +
                          std::to_string(oversampling));
    }
    if (!(compression_ratio > 0.0)) {
        throw ConfigError("compression ratio must be positive, got " +
                          std::to_string(compression_ratio));
    }
    return static_cast<int>(std::ceil(4.0 * oversampling / compression_ratio)) * 4;
}

const ThresholdEntry& StoppingThresholds::entry(int k) const {
    if (k < 1 || k > k_max()) {
        throw std::out_of_range("observation count " + std::to_string(k) +
                                " outside threshold table range [1, " +
                                std::to_string(k_max()) + "]");
    }
    return entries_[static_cast<std::size_t>(k - 1)];
}

bool stop_decision(const StoppingThresholds& thresholds, const ObservationSummary& obs) {
    const ThresholdEntry& e = thresholds.entry(static_cast<int>(obs.count));
    switch (e.kind) {
    case ThresholdKind::AlwaysStop:
        return true;
    case ThresholdKind::NeverStop:
        return false;
    case ThresholdKind::TwoSided: {
        const double avg = std::abs(obs.mean());
        return (e.has_lower && avg <= e.tau_lo) || (e.has_upper && avg >= e.tau_hi);
    }
    }
    return false;
}

void write_thresholds_csv(std::ostream& out, const StoppingThresholds& thresholds) {
    out << "k,kind,tau_lo,tau_hi\n";
    for (int k = 1; k <= thresholds.k_max(); ++k) {
        const ThresholdEntry& e = thresholds.entry(k);
        out << k << ',';
        switch (e.kind) {
        case ThresholdKind::AlwaysStop:
            out << "always_stop,,";
            break;
        case ThresholdKind::NeverStop:
            out << "never_stop,,";
            break;
        case ThresholdKind::TwoSided:
            out << "two_sided," << format_number(e.has_lower ? e.tau_lo : 0.0) << ','
                << (e.has_upper ? format_number(e.tau_hi) : "inf");
            break;
        }
        out << '\n';
    }
}

} // namespace oas
