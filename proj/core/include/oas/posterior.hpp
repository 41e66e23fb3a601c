#pragma once

// Conditional-mean estimators and posterior mean-squared error for one
// component observed through repeated noisy measurements.
//
// Measurements of a component are conditionally i.i.d. Gaussian around
// its value, so (sum of observations, count) is a sufficient statistic;
// every routine here consumes that pair. The templates in detail:: do
// the arithmetic for any floating type; tests instantiate them in long
// double to push finite-difference checks below tolerance.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>

#include "oas/source_model.hpp"

namespace oas {

// Sufficient statistic for repeated measurements of one component.
struct ObservationSummary {
    double sum = 0.0;        // sum of the k observations
    std::int64_t count = 0;  // k

    double mean() const { return sum / static_cast<double>(count); }
};

struct PosteriorEstimate {
    double r;    // conditional mean E[x | observations]
    double mse;  // conditional variance E[(x - r)^2 | observations]
};

namespace detail {

// Numerically stable 1 / (1 + e^{-x}); exact 0 and 1 at -+infinity.
template <class Real>
Real logistic(Real x) {
    if (x >= Real(0)) return Real(1) / (Real(1) + std::exp(-x));
    const Real e = std::exp(x);
    return e / (Real(1) + e);
}

// Log-odds that a sparse-Gaussian component is exactly zero given
// (sum, count). Kept in log space so p = 0 flows through as -infinity
// and collapses the estimator to the plain Gaussian shrinkage.
template <class Real>
Real sg_log_gate(Real s, Real k, Real sigma2, Real p) {
    return std::log(p) - std::log1p(-p) + Real(0.5) * std::log1p(k / sigma2) -
           s * s / (Real(2) * sigma2 * (k + sigma2));
}

template <class Real>
Real sg_reconstruct_impl(Real s, Real k, Real sigma2, Real p) {
    const Real gate = sg_log_gate(s, k, sigma2, p);
    return logistic(-gate) * s / (k + sigma2);
}

template <class Real>
Real sg_posterior_mse_impl(Real s, Real k, Real sigma2, Real p) {
    const Real gate = sg_log_gate(s, k, sigma2, p);
    const Real on = logistic(-gate);  // posterior probability the component is active
    const Real shrunk = s / (k + sigma2);
    Real mse = on * sigma2 / (k + sigma2);
    // Once the zero hypothesis carries no weight the cross term vanishes;
    // skipping it also avoids 0 * inf when s^2 overflows.
    if (gate >= Real(-700)) mse += logistic(gate) * on * shrunk * shrunk;
    return mse;
}

// Half the prior log-odds of +1 over -1: r(s=0) = tanh(bin_bias(p)).
template <class Real>
Real bin_bias(Real p) {
    return Real(0.5) * (std::log(p) - std::log1p(-p));
}

template <class Real>
Real bin_reconstruct_impl(Real s, Real sigma2, Real p) {
    return std::tanh(s / sigma2 + bin_bias(p));
}

// 1 - r^2 evaluated in log space: 4p(1-p) / (p e^t + (1-p) e^{-t})^2
// with t = s / sigma^2. Direct 1 - r^2 cancels once |t| is large.
template <class Real>
Real bin_posterior_mse_impl(Real s, Real sigma2, Real p) {
    const Real t = s / sigma2;
    const Real lp = std::log(p);
    const Real lq = std::log1p(-p);
    const Real a = lq - t;
    const Real b = lp + t;
    const Real m = std::max(a, b);
    const Real lse = m + std::log(std::exp(a - m) + std::exp(b - m));
    return std::exp(std::log(Real(4)) + lp + lq - Real(2) * lse);
}

} // namespace detail

// Sparse-Gaussian estimator and its posterior MSE; p is the prior
// probability that the component is exactly zero.
double sg_reconstruct(const ObservationSummary& obs, double sigma2, double p);
double sg_posterior_mse(const ObservationSummary& obs, double sigma2, double p);

// Binary estimator and its posterior MSE; p is the prior probability of +1.
double bin_reconstruct(const ObservationSummary& obs, double sigma2, double p);
double bin_posterior_mse(const ObservationSummary& obs, double sigma2, double p);

// Dispatch on the source model.
double reconstruct(const SourceModel& model, const ObservationSummary& obs, double sigma2);
double posterior_mse(const SourceModel& model, const ObservationSummary& obs, double sigma2);

// Reference implementation that evaluates the posterior by quadrature
// over the full observation list, never reducing it to (sum, count).
// Adaptive: doubles the quadrature order until two successive orders
// agree to near machine precision, and throws NumericalError if they
// never do. Slow; intended for validation, not scheduling.
PosteriorEstimate posterior_oracle(const SourceModel& model,
                                   std::span<const double> observations, double sigma2);

} // namespace oas
