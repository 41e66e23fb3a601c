#include "oas/baseline.hpp"

#include <cmath>
#include <string>

#include "oas/errors.hpp"
#include "oas/num_format.hpp"
#include "oas/posterior.hpp"
#include "oas/rng.hpp"

namespace oas {

double orthogonal_sigma2(const SourceModel& model, double compression_ratio,
                         double esn0_db) {
    if (!(compression_ratio >= 1.0)) {
        throw ConfigError("orthogonal baseline needs compression ratio >= 1, got " +
                          format_number(compression_ratio));
    }
    const double snr = std::pow(10.0, esn0_db / 10.0);
    return compression_ratio * model.average_power() / snr;
}

std::vector<double> orthogonal_trial(const OrthogonalConfig& config,
                                     std::span<const double> truth, std::uint64_t seed) {
    if (config.n_components < 1) {
        throw ConfigError("component count must be >= 1, got " +
                          std::to_string(config.n_components));
    }
    if (static_cast<int>(truth.size()) != config.n_components) {
        throw ConfigError("truth vector has " + std::to_string(truth.size()) +
                          " components, config expects " +
                          std::to_string(config.n_components));
    }
    const double sigma2 =
        orthogonal_sigma2(config.model, config.compression_ratio, config.esn0_db);
    const double noise_sd = std::sqrt(sigma2);

    auto gen = rng::make_stream(seed);
    std::vector<double> errors(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double y = truth[i] + noise_sd * gen.next_gaussian();
        const double r = reconstruct(config.model, ObservationSummary{y, 1}, sigma2);
        errors[i] = (r - truth[i]) * (r - truth[i]);
    }
    return errors;
}

} // namespace oas
