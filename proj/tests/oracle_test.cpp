#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oas/posterior.hpp"
#include "oas/source_model.hpp"

using namespace oas;

namespace {

bool close(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + 1e-12;
}

} // namespace

TEST_CASE("reference posterior spot values") {
    const SourceModel model = SourceModel::sparse_gaussian(0.9);
    const std::vector<double> obs{1.2, 0.8};
    const PosteriorEstimate est = posterior_oracle(model, obs, 1.0);
    CHECK(est.r == doctest::Approx(0.074046258837503348).epsilon(1e-11));
    CHECK(est.mse == doctest::Approx(0.080904453529256695).epsilon(1e-11));
}

TEST_CASE("closed form matches the reference on a sparse gaussian grid") {
    for (double p : {0.0, 0.1, 0.9}) {
        const SourceModel model = SourceModel::sparse_gaussian(p);
        for (double sigma2 : {0.25, 1.0}) {
            for (int k : {1, 2, 5}) {
                for (double avg : {0.0, 0.5, 2.0, 4.0}) {
                    std::vector<double> obs(static_cast<std::size_t>(k), avg);
                    double sum = 0.0;
                    for (const double y : obs) sum += y;
                    const PosteriorEstimate ref = posterior_oracle(model, obs, sigma2);
                    const ObservationSummary summary{sum, k};
                    CHECK(close(ref.r, sg_reconstruct(summary, sigma2, p), 1e-9));
                    CHECK(close(ref.mse, sg_posterior_mse(summary, sigma2, p), 1e-9));
                }
            }
        }
    }
}

TEST_CASE("closed form matches the reference on a binary grid") {
    for (double p : {0.3, 0.5, 0.9}) {
        const SourceModel model = SourceModel::binary(p);
        for (double sigma2 : {0.5, 2.0}) {
            for (int k : {1, 3}) {
                for (double avg : {-2.0, -0.5, 0.0, 1.0, 3.0}) {
                    std::vector<double> obs(static_cast<std::size_t>(k), avg);
                    double sum = 0.0;
                    for (const double y : obs) sum += y;
                    const PosteriorEstimate ref = posterior_oracle(model, obs, sigma2);
                    const ObservationSummary summary{sum, k};
                    CHECK(close(ref.r, bin_reconstruct(summary, sigma2, p), 1e-12));
                    CHECK(close(ref.mse, bin_posterior_mse(summary, sigma2, p), 1e-12));
                }
            }
        }
    }
}

TEST_CASE("the observation list enters only through its sum") {
    // [1.2, 0.8] and [0.8, 1.2] carry the same sufficient statistic; the
    // reference must agree with the summary-based estimator either way.
    const SourceModel model = SourceModel::sparse_gaussian(0.9);
    const std::vector<double> a{1.2, 0.8};
    const std::vector<double> b{0.8, 1.2};
    const std::vector<double> c{1.0, 1.0};
    const PosteriorEstimate ea = posterior_oracle(model, a, 1.0);
    const PosteriorEstimate eb = posterior_oracle(model, b, 1.0);
    const PosteriorEstimate ec = posterior_oracle(model, c, 1.0);
    CHECK(ea.r == doctest::Approx(eb.r).epsilon(1e-13));
    CHECK(ea.mse == doctest::Approx(eb.mse).epsilon(1e-13));
    CHECK(ea.r == doctest::Approx(ec.r).epsilon(1e-10));
    CHECK(ea.mse == doctest::Approx(ec.mse).epsilon(1e-10));
    CHECK(close(ea.r, sg_reconstruct({2.0, 2}, 1.0, 0.9), 1e-10));
    CHECK(close(ea.mse, sg_posterior_mse({2.0, 2}, 1.0, 0.9), 1e-10));
}

TEST_CASE("reference posterior validation") {
    const SourceModel model = SourceModel::sparse_gaussian(0.9);
    const std::vector<double> empty;
    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(posterior_oracle(model, empty, 1.0), std::domain_error);
    CHECK_THROWS_AS(posterior_oracle(model, one, 0.0), std::domain_error);
    CHECK_THROWS_AS(posterior_oracle(model, one, -1.0), std::domain_error);
}
