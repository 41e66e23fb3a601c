#include "oas/posterior.hpp"

#include <stdexcept>
#include <string>

namespace oas {

namespace {

void check_inputs(const ObservationSummary& obs, double sigma2) {
    if (!(sigma2 > 0.0)) {
        throw std::domain_error("noise variance must be positive, got " +
                                std::to_string(sigma2));
    }
    if (obs.count < 1) {
        throw std::domain_error("estimator needs at least one observation, got count " +
                                std::to_string(obs.count));
    }
}

} // namespace

double sg_reconstruct(const ObservationSummary& obs, double sigma2, double p) {
    check_inputs(obs, sigma2);
    return detail::sg_reconstruct_impl<double>(obs.sum, static_cast<double>(obs.count),
                                               sigma2, p);
}

double sg_posterior_mse(const ObservationSummary& obs, double sigma2, double p) {
    check_inputs(obs, sigma2);
    return detail::sg_posterior_mse_impl<double>(obs.sum, static_cast<double>(obs.count),
                                                 sigma2, p);
}

double bin_reconstruct(const ObservationSummary& obs, double sigma2, double p) {
    check_inputs(obs, sigma2);
    return detail::bin_reconstruct_impl<double>(obs.sum, sigma2, p);
}

double bin_posterior_mse(const ObservationSummary& obs, double sigma2, double p) {
    check_inputs(obs, sigma2);
    return detail::bin_posterior_mse_impl<double>(obs.sum, sigma2, p);
}

double reconstruct(const SourceModel& model, const ObservationSummary& obs, double sigma2) {
    switch (model.kind()) {
    case SourceKind::SparseGaussian:
        return sg_reconstruct(obs, sigma2, model.p());
    case SourceKind::Binary:
        return bin_reconstruct(obs, sigma2, model.p());
    }
    throw std::logic_error("unreachable source kind");
}

double posterior_mse(const SourceModel& model, const ObservationSummary& obs, double sigma2) {
    switch (model.kind()) {
    case SourceKind::SparseGaussian:
        return sg_posterior_mse(obs, sigma2, model.p());
    case SourceKind::Binary:
        return bin_posterior_mse(obs, sigma2, model.p());
    }
    throw std::logic_error("unreachable source kind");
}

} // namespace oas
