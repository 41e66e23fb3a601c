#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "oas/posterior.hpp"
#include "oas/source_model.hpp"

using namespace oas;

TEST_CASE("sparse gaussian spot values") {
    // Frozen against an independent quadrature evaluation of the posterior.
    CHECK(sg_reconstruct({2.0, 1}, 1.0, 0.9) ==
          doctest::Approx(0.1759838111583588).epsilon(1e-14));
    CHECK(sg_posterior_mse({0.0, 1}, 1.0, 0.9) ==
          doctest::Approx(0.0364221182029747).epsilon(1e-14));

    // p = 0 collapses to plain Gaussian shrinkage: r = s/(k+sigma2),
    // mse = sigma2/(k+sigma2), independent of the data.
    CHECK(sg_reconstruct({2.0, 1}, 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(sg_posterior_mse({2.0, 1}, 1.0, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(sg_posterior_mse({-7.0, 3}, 2.0, 0.0) == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("binary spot values") {
    // Fair prior: r = tanh(s / sigma2), mse = 1 - r^2, bit for bit.
    CHECK(bin_reconstruct({1.0, 1}, 1.0, 0.5) == std::tanh(1.0));
    CHECK(bin_reconstruct({3.0, 4}, 2.0, 0.5) == std::tanh(1.5));
    CHECK(bin_posterior_mse({1.0, 1}, 1.0, 0.5) ==
          doctest::Approx(0.4199743416140261).epsilon(1e-14));

    // No data: the estimate is the prior mean, the mse the prior variance.
    CHECK(bin_reconstruct({0.0, 1}, 1.0, 0.7) == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(bin_posterior_mse({0.0, 1}, 1.0, 0.9) == doctest::Approx(0.36).epsilon(1e-13));
}

TEST_CASE("sparse gaussian tends to the linear estimator as p vanishes") {
    double worst = 0.0;
    for (double ybar = -4.0; ybar <= 4.0; ybar += 0.25) {
        for (int k = 1; k <= 8; ++k) {
            const ObservationSummary obs{ybar * k, k};
            const double shrink = obs.sum / (k + 1.0);
            worst = std::max(worst, std::abs(sg_reconstruct(obs, 1.0, 1e-8) - shrink));
            worst = std::max(worst,
                             std::abs(sg_posterior_mse(obs, 1.0, 1e-8) - 1.0 / (k + 1.0)));
        }
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("estimator symmetry in the observation sign") {
    for (double s : {0.25, 1.0, 3.5, 17.0}) {
        for (int k : {1, 2, 7}) {
            CHECK(sg_reconstruct({-s, k}, 0.7, 0.9) == -sg_reconstruct({s, k}, 0.7, 0.9));
            CHECK(sg_posterior_mse({-s, k}, 0.7, 0.9) == sg_posterior_mse({s, k}, 0.7, 0.9));
            CHECK(bin_reconstruct({-s, k}, 0.7, 0.5) ==
                  doctest::Approx(-bin_reconstruct({s, k}, 0.7, 0.5)).epsilon(1e-15));
            CHECK(bin_posterior_mse({-s, k}, 0.7, 0.5) ==
                  doctest::Approx(bin_posterior_mse({s, k}, 0.7, 0.5)).epsilon(1e-15));
        }
    }
}

TEST_CASE("extreme observation sums stay finite") {
    for (double s : {1e12, 1e300, -1e300}) {
        const double r = sg_reconstruct({s, 1}, 1.0, 0.9);
        const double m = sg_posterior_mse({s, 1}, 1.0, 0.9);
        CHECK(std::isfinite(r));
        CHECK(std::isfinite(m));
        // Far out the zero hypothesis is dead and the mse settles at the
        // pure-Gaussian floor.
        CHECK(m == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(std::abs(bin_reconstruct({s, 1}, 1.0, 0.5)) == 1.0);
        CHECK(bin_posterior_mse({s, 1}, 1.0, 0.9) >= 0.0);
        CHECK(std::isfinite(bin_posterior_mse({s, 1}, 1.0, 0.9)));
    }
    CHECK(bin_posterior_mse({1e300, 1}, 1.0, 0.9) == 0.0);
}

TEST_CASE("posterior mse is not monotone in the observation count") {
    // A second look at the same suspicious average can raise the posterior
    // mse: the extra evidence makes the active hypothesis more plausible
    // without yet resolving the component.
    const double m1 = sg_posterior_mse({0.9, 1}, 1.0, 0.9);
    const double m2 = sg_posterior_mse({1.8, 2}, 1.0, 0.9);
    CHECK(m2 > m1);
}

TEST_CASE("per-look mse increments shrink as slots are divided finer") {
    // Fixed running average and fixed elapsed time (count = oversampling,
    // noise scaled with it): the change from one extra look must fade as
    // the division gets finer.
    double previous = 1e9;
    for (int m : {4, 8, 16, 32}) {
        const double sigma2 = 0.02 * m;
        const double ybar = 0.8;
        const double before = sg_posterior_mse({ybar * m, m}, sigma2, 0.9);
        const double after = sg_posterior_mse({ybar * (m + 1), m + 1}, sigma2, 0.9);
        const double delta = std::abs(after - before);
        CHECK(delta < previous);
        previous = delta;
    }
}

TEST_CASE("finite difference relation between estimate and mse") {
    // The posterior mse equals (sigma2 / k) times the derivative of the
    // estimator in the running average. Checked with a central difference
    // in long double so truncation error stays below the tolerance.
    for (double p : {0.0, 0.1, 0.9}) {
        for (double ybar : {0.3, 1.1, 2.5}) {
            for (int k : {1, 4}) {
                const long double kk = k, s2 = 0.7L, h = 1e-6L;
                const long double rp = detail::sg_reconstruct_impl((ybar + h) * kk, kk, s2,
                                                                   (long double)p);
                const long double rm = detail::sg_reconstruct_impl((ybar - h) * kk, kk, s2,
                                                                   (long double)p);
                const long double lhs = (s2 / kk) * (rp - rm) / (2 * h);
                const long double mse = detail::sg_posterior_mse_impl(
                    (long double)ybar * kk, kk, s2, (long double)p);
                CHECK((double)lhs == doctest::Approx((double)mse).epsilon(1e-9));
            }
        }
    }
    for (double ybar : {0.3, 1.1}) {
        const long double s2 = 0.7L, h = 1e-6L, p = 0.5L;
        const long double rp = detail::bin_reconstruct_impl(ybar + h, s2, p);
        const long double rm = detail::bin_reconstruct_impl(ybar - h, s2, p);
        const long double lhs = s2 * (rp - rm) / (2 * h);
        const long double mse = detail::bin_posterior_mse_impl((long double)ybar, s2, p);
        CHECK((double)lhs == doctest::Approx((double)mse).epsilon(1e-9));
    }
}

TEST_CASE("model dispatch matches the direct entry points") {
    const SourceModel sg = SourceModel::sparse_gaussian(0.9);
    const SourceModel bin = SourceModel::binary(0.7);
    const ObservationSummary obs{1.3, 2};
    CHECK(reconstruct(sg, obs, 0.5) == sg_reconstruct(obs, 0.5, 0.9));
    CHECK(posterior_mse(sg, obs, 0.5) == sg_posterior_mse(obs, 0.5, 0.9));
    CHECK(reconstruct(bin, obs, 0.5) == bin_reconstruct(obs, 0.5, 0.7));
    CHECK(posterior_mse(bin, obs, 0.5) == bin_posterior_mse(obs, 0.5, 0.7));
}

TEST_CASE("posterior argument validation") {
    CHECK_THROWS_AS(sg_reconstruct({1.0, 1}, 0.0, 0.9), std::domain_error);
    CHECK_THROWS_AS(sg_posterior_mse({1.0, 1}, -1.0, 0.9), std::domain_error);
    CHECK_THROWS_AS(sg_reconstruct({1.0, 0}, 1.0, 0.9), std::domain_error);
    CHECK_THROWS_AS(bin_reconstruct({1.0, -2}, 1.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(bin_posterior_mse({1.0, 1}, 0.0, 0.5), std::domain_error);
}
