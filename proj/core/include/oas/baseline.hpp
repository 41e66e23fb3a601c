#pragma once

// Non-adaptive reference scheme: orthogonal sensing with reduced
// sampling time. Every component is observed exactly once, with the
// per-look time shrunk by the compression ratio, so the look noise
// variance grows by the same factor; reconstruction is the optimal
// scalar estimator at a single observation.

#include <cstdint>
#include <span>
#include <vector>

#include "oas/source_model.hpp"

namespace oas {

struct OrthogonalConfig {
    SourceModel model;
    int n_components = 0;
    double compression_ratio = 1.0;  // >= 1
    double esn0_db = 0.0;
};

// Per-look noise variance: c * average_power / (Es/N0 linear).
double orthogonal_sigma2(const SourceModel& model, double compression_ratio, double esn0_db);

// Squared reconstruction errors, one per component.
std::vector<double> orthogonal_trial(const OrthogonalConfig& config,
                                     std::span<const double> truth, std::uint64_t seed);

} // namespace oas
