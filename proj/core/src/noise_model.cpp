#include "dendro/noise_model.hpp"

#include <numbers>
#include <string>
#include <vector>

#include "dendro/errors.hpp"

namespace dendro {

NoiseSpec NoiseSpec::from_std(double std) {
    if (!(std > 0.0) || !std::isfinite(std)) {
        throw DomainError{"noise standard deviation must be positive, got " + std::to_string(std)};
    }
    return NoiseSpec{std * std};
}

LogNormalParams params_for(double theta, const NoiseSpec& spec) {
    if (!(theta > 0.0)) {
        throw DomainError{"lognormal mean must be positive, got " + std::to_string(theta)};
    }
    if (!(spec.variance > 0.0)) {
        throw DomainError{"measurement variance must be positive"};
    }
    const double s2 = std::log1p(spec.variance / (theta * theta));
    return LogNormalParams{std::log(theta) - 0.5 * s2, std::sqrt(s2)};
}

double NoiseModel::log_density(std::span<const double> x, std::span<const double> theta) const {
    if (x.size() != theta.size()) {
        throw DomainError{"measurement and metric sizes differ"};
    }
    double total = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        total += log_density(x[k], theta[k]);
    }
    return total;
}

LogNormalNoise::LogNormalNoise(NoiseSpec spec) : spec_{spec} {
    if (!(spec_.variance > 0.0)) {
        throw DomainError{"measurement variance must be positive"};
    }
}

double LogNormalNoise::log_density(double x, double theta) const {
    if (!(x > 0.0)) {
        throw DomainError{"measurement must be positive, got " + std::to_string(x)};
    }
    const auto [mu, sigma] = params_for(theta, spec_);
    const double z = (std::log(x) - mu) / sigma;
    return -std::log(sigma * x) - 0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * z * z;
}

double LogNormalNoise::sample(double theta, Rng& rng) const {
    const auto [mu, sigma] = params_for(theta, spec_);
    return std::exp(mu + sigma * rng.normal());
}

double log_density(const Dissimilarity& x, const Dissimilarity& theta, const NoiseSpec& spec) {
    if (x.size() != theta.size()) {
        throw DomainError{"measurement and metric sizes differ"};
    }
    return LogNormalNoise{spec}.log_density(x.values(), theta.values());
}

Dissimilarity sample_measurement(const Dissimilarity& theta, const NoiseModel& model, Rng& rng) {
    std::vector<double> out;
    out.reserve(theta.pairs());
    for (const double t : theta.values()) {
        out.push_back(model.sample(t, rng));
    }
    return Dissimilarity{theta.size(), std::move(out)};
}

Dissimilarity sample_measurement(const Dissimilarity& theta, const NoiseSpec& spec, Rng& rng) {
    return sample_measurement(theta, LogNormalNoise{spec}, rng);
}

}  // namespace dendro
