#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "oas/errors.hpp"
#include "oas/gauss_hermite.hpp"
#include "oas/posterior.hpp"

namespace oas {

namespace {

constexpr long double kPi = 3.141592653589793238462643383279502884L;

// Relative agreement between two successive quadrature orders that ends
// the refinement ladder.
bool settled(long double a, long double b) {
    const long double tol = 1e-10L * std::max(std::abs(a), std::abs(b)) + 1e-15L;
    return std::abs(a - b) <= tol;
}

// Sparse-Gaussian reference. The posterior is a point mass at zero plus
// a continuous branch proportional to prior(x) * likelihood(x). The
// continuous branch is integrated by Gauss-Hermite quadrature recentered
// at its mode and scaled to its curvature, both found numerically from
// the observation list; the quadrature order doubles until two
// successive orders agree.
PosteriorEstimate sg_oracle(std::span<const double> obs, double sigma2, double p) {
    const long double s2 = sigma2;
    const long double pl = p;

    // Log-density of the active branch, including the prior normalizer
    // it does not share with the point-mass branch. The common
    // (2 pi sigma^2)^{-k/2} likelihood factor cancels in the posterior
    // and is dropped from both branches.
    const auto log_active = [&](long double x) {
        long double q = 0.0L;
        for (const double y : obs) {
            const long double d = static_cast<long double>(y) - x;
            q += d * d;
        }
        return std::log1p(-pl) - 0.5L * std::log(2.0L * kPi) - 0.5L * x * x -
               q / (2.0L * s2);
    };
    const auto dlog_active = [&](long double x) {
        long double acc = 0.0L;
        for (const double y : obs) acc += static_cast<long double>(y) - x;
        return acc / s2 - x;
    };

    // Newton iteration for the mode of the active branch, with a
    // finite-difference slope of the score.
    long double mode = 0.0L;
    for (int it = 0; it < 64; ++it) {
        const long double g = dlog_active(mode);
        const long double h = 1e-4L * std::max(1.0L, std::abs(mode));
        const long double gp = (dlog_active(mode + h) - dlog_active(mode - h)) / (2.0L * h);
        if (!(gp < 0.0L)) {
            throw NumericalError("posterior mode search lost concavity at x = " +
                                 std::to_string(static_cast<double>(mode)));
        }
        const long double step = g / gp;
        mode -= step;
        if (std::abs(step) <= 1e-18L * std::max(1.0L, std::abs(mode))) break;
    }
    const long double hc = 1e-4L * std::max(1.0L, std::abs(mode));
    const long double curvature =
        (dlog_active(mode + hc) - dlog_active(mode - hc)) / (2.0L * hc);
    const long double alpha = 1.0L / std::sqrt(-curvature);

    long double log_point = std::log(pl);
    for (const double y : obs) {
        log_point -= static_cast<long double>(y) * static_cast<long double>(y) / (2.0L * s2);
    }
    const long double log_peak = std::max(log_active(mode), log_point);
    const long double point_mass = std::exp(log_point - log_peak);

    // Moments are taken about the mode so that the r^2 subtraction in
    // the variance never cancels more than the offset itself.
    long double prev_r = 0.0L;
    long double prev_mse = 0.0L;
    bool have_prev = false;
    for (int order = 16; order <= 2048; order *= 2) {
        const HermiteRule& rule = hermite_rule(order);
        const long double scale = std::sqrt(2.0L) * alpha;
        long double c0 = 0.0L;
        long double c1 = 0.0L;
        long double c2 = 0.0L;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const long double dx = scale * static_cast<long double>(rule.nodes[i]);
            const long double w = static_cast<long double>(rule.weights[i]) *
                                  std::exp(log_active(mode + dx) - log_peak);
            c0 += w;
            c1 += w * dx;
            c2 += w * dx * dx;
        }
        const long double t0 = scale * c0 + point_mass;
        const long double t1 = scale * c1 + point_mass * (0.0L - mode);
        const long double t2 = scale * c2 + point_mass * mode * mode;
        const long double shift = t1 / t0;
        const long double r = mode + shift;
        const long double mse = t2 / t0 - shift * shift;
        if (have_prev && settled(r, prev_r) && settled(mse, prev_mse)) {
            return {static_cast<double>(r), static_cast<double>(mse)};
        }
        prev_r = r;
        prev_mse = mse;
        have_prev = true;
    }
    throw NumericalError(
        "posterior quadrature did not settle by order 2048 (count " +
        std::to_string(obs.size()) + ", sigma2 " + std::to_string(sigma2) + ", p " +
        std::to_string(p) + ", last r " + std::to_string(static_cast<double>(prev_r)) +
        ", last mse " + std::to_string(static_cast<double>(prev_mse)) + ")");
}

// Binary reference: the prior has two support points, so the posterior
// expectation is an exact two-term sum taken in the log domain.
PosteriorEstimate bin_oracle(std::span<const double> obs, double sigma2, double p) {
    const long double s2 = sigma2;
    long double log_plus = std::log(static_cast<long double>(p));
    long double log_minus = std::log1p(-static_cast<long double>(p));
    for (const double y : obs) {
        const long double dp = static_cast<long double>(y) - 1.0L;
        const long double dm = static_cast<long double>(y) + 1.0L;
        log_plus -= dp * dp / (2.0L * s2);
        log_minus -= dm * dm / (2.0L * s2);
    }
    const long double d = log_plus - log_minus;
    const long double wp = detail::logistic(d);
    const long double wm = detail::logistic(-d);
    const long double r = wp - wm;
    const long double mse = wp * (1.0L - r) * (1.0L - r) + wm * (1.0L + r) * (1.0L + r);
    return {static_cast<double>(r), static_cast<double>(mse)};
}

} // namespace

PosteriorEstimate posterior_oracle(const SourceModel& model,
                                   std::span<const double> observations, double sigma2) {
    if (!(sigma2 > 0.0)) {
        throw std::domain_error("noise variance must be positive, got " +
                                std::to_string(sigma2));
    }
    if (observations.empty()) {
        throw std::domain_error("reference posterior needs at least one observation");
    }
    switch (model.kind()) {
    case SourceKind::SparseGaussian:
        return sg_oracle(observations, sigma2, model.p());
    case SourceKind::Binary:
        return bin_oracle(observations, sigma2, model.p());
    }
    throw std::logic_error("unreachable source kind");
}

} // namespace oas
