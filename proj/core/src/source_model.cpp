#include "oas/source_model.hpp"

#include <string>

#include "oas/errors.hpp"
#include "oas/rng.hpp"

namespace oas {

SourceModel SourceModel::sparse_gaussian(double p) {
    if (!(p >= 0.0 && p < 1.0)) {
        throw ConfigError("sparse gaussian zero probability must be in [0, 1), got " +
                          std::to_string(p));
    }
    return SourceModel(SourceKind::SparseGaussian, p);
}

SourceModel SourceModel::binary(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw ConfigError("binary plus-one probability must be in (0, 1), got " +
                          std::to_string(p));
    }
    return SourceModel(SourceKind::Binary, p);
}

double SourceModel::prior_mean() const {
    switch (kind_) {
    case SourceKind::SparseGaussian:
        return 0.0;
    case SourceKind::Binary:
        // P(+1) = p, P(-1) = 1 - p.
        return 2.0 * p_ - 1.0;
    }
    return 0.0;
}

double SourceModel::prior_variance() const {
    switch (kind_) {
    case SourceKind::SparseGaussian:
        return 1.0 - p_;
    case SourceKind::Binary:
        return 4.0 * p_ * (1.0 - p_);
    }
    return 0.0;
}

double SourceModel::average_power() const {
    switch (kind_) {
    case SourceKind::SparseGaussian:
        return 1.0 - p_;
    case SourceKind::Binary:
        return 1.0;
    }
    return 0.0;
}

std::vector<double> sample_source(const SourceModel& model, int n, std::uint64_t seed) {
    if (n < 1) throw ConfigError("source draw needs n >= 1, got " + std::to_string(n));
    auto gen = rng::make_stream(seed);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (double& v : x) {
        const double u = gen.next_double();
        switch (model.kind()) {
        case SourceKind::SparseGaussian:
            v = (u < model.p()) ? 0.0 : gen.next_gaussian();
            break;
        case SourceKind::Binary:
            v = (u < model.p()) ? 1.0 : -1.0;
            break;
        }
    }
    return x;
}

} // namespace oas
