#pragma once

// Source priors for the scalar components being sensed.
//
// Two models are supported:
//   - sparse Gaussian: x = 0 with probability p, otherwise x ~ N(0, 1)
//   - binary antipodal: x = +1 with probability p, otherwise x = -1

#include <cstdint>
#include <vector>

namespace oas {

enum class SourceKind {
    SparseGaussian,
    Binary,
};

class SourceModel {
public:
    static SourceModel sparse_gaussian(double p);
    static SourceModel binary(double p);

    SourceKind kind() const { return kind_; }
    double p() const { return p_; }

    double prior_mean() const;
    double prior_variance() const;

    // E[x^2], used to convert an Es/N0 operating point into a per-slot
    // noise variance.
    double average_power() const;

private:
    SourceModel(SourceKind kind, double p) : kind_(kind), p_(p) {}

    SourceKind kind_;
    double p_;
};

// Draw n independent source values. Sparse Gaussian zeros are exact 0.0
// so that sparsity survives reconstruction-error bookkeeping.
std::vector<double> sample_source(const SourceModel& model, int n, std::uint64_t seed);

} // namespace oas
