#include "dpinfer/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace dpinfer {

namespace {

void check_alignment(const EstimatorWeights& weights,
                     const QueryHistory& history) {
    if (weights.weights.size() != history.row_count()) {
        throw ShapeError("weight row length " +
                         std::to_string(weights.weights.size()) +
                         " does not match history row count " +
                         std::to_string(history.row_count()));
    }
}

// Laplace scale of row k's weighted noise contribution A_k * N_k.
double contribution_scale(const EstimatorWeights& weights,
                          const QueryHistory& history, std::size_t k) {
    const HistoryRow& row = history.row(k);
    return std::abs(weights.weights[k]) * row.sensitivity / row.alpha;
}

}  // namespace

ProbabilityMassVector mc_noise_pmv(const EstimatorWeights& weights,
                                   const QueryHistory& history,
                                   std::size_t sample_size,
                                   const NoiseSource& source) {
    check_alignment(weights, history);
    if (sample_size < kMinSampleSize) {
        throw ContractError("sample size " + std::to_string(sample_size) +
                            " is below the floor of " +
                            std::to_string(kMinSampleSize));
    }

    std::vector<double> sums(sample_size, 0.0);
    for (std::size_t k = 0; k < history.row_count(); ++k) {
        const double a = weights.weights[k];
        if (a == 0.0) continue;
        const HistoryRow& row = history.row(k);
        NoiseSource row_source = source.stream(k);
        for (double& y : sums) {
            y += a * sample_laplace(row.alpha, row.sensitivity, row_source);
        }
    }

    long long max_abs = 0;
    std::vector<long long> rounded(sample_size);
    for (std::size_t i = 0; i < sample_size; ++i) {
        rounded[i] = std::llround(sums[i]);
        max_abs = std::max(max_abs, std::llabs(rounded[i]));
    }

    const std::size_t length = static_cast<std::size_t>(2 * max_abs + 1);
    std::vector<std::size_t> counts(length, 0);
    for (long long r : rounded) {
        ++counts[static_cast<std::size_t>(r + max_abs)];
    }
    std::vector<double> masses(length);
    for (std::size_t i = 0; i < length; ++i) {
        masses[i] = static_cast<double>(counts[i]) /
                    static_cast<double>(sample_size);
    }
    return ProbabilityMassVector(std::move(masses));
}

std::vector<std::size_t> pc_lengths(const EstimatorWeights& weights,
                                    const QueryHistory& history,
                                    double gamma) {
    check_alignment(weights, history);
    if (!(gamma > 0.0) || !(gamma < 1.0)) {
        throw ContractError("gamma must lie in (0, 1)");
    }
    const double m = static_cast<double>(history.row_count());
    const double log_budget = std::log(m / gamma);

    std::vector<std::size_t> lengths(history.row_count(), 1);
    for (std::size_t k = 0; k < history.row_count(); ++k) {
        const double scale = contribution_scale(weights, history, k);
        if (scale == 0.0) continue;  // zero-weight rows stay a point mass
        auto length =
            static_cast<std::size_t>(std::ceil(2.0 * scale * log_budget));
        if (length < 1) length = 1;
        if (length % 2 == 0) ++length;
        lengths[k] = length;
    }
    return lengths;
}

ProbabilityMassVector pc_noise_pmv(const EstimatorWeights& weights,
                                   const QueryHistory& history, double gamma) {
    const std::vector<std::size_t> lengths = pc_lengths(weights, history, gamma);

    // Convolve shortest first: running-vector length stays minimal, which
    // the quadratic cost model rewards.
    std::vector<std::size_t> order(lengths.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return lengths[a] < lengths[b];
    });

    ProbabilityMassVector result = ProbabilityMassVector::point_mass();
    for (std::size_t k : order) {
        const double a = weights.weights[k];
        if (a == 0.0) continue;
        const HistoryRow& row = history.row(k);
        result = convolve(
            result, laplace_pmv(row.alpha, row.sensitivity, a, lengths[k]));
    }
    return result;
}

Posterior posterior_of(const EstimatorWeights& weights,
                       const QueryHistory& history,
                       const InferenceConfig& config,
                       const NoiseSource& source) {
    ProbabilityMassVector noise =
        config.method == PosteriorMethod::monte_carlo
            ? mc_noise_pmv(weights, history, config.sample_size, source)
            : pc_noise_pmv(weights, history, config.gamma);

    // theta = A.y - A.N: a noise offset of +o puts theta at -o, so the
    // posterior is the noise vector reflected about the center. The Laplace
    // sum is symmetric, but the mapping is applied unconditionally.
    std::vector<double> reflected(noise.masses().rbegin(),
                                  noise.masses().rend());
    ProbabilityMassVector mass(std::move(reflected));

    const double center = blue_point_estimate(weights, history);
    double loss = mass.loss();
    if (config.method == PosteriorMethod::monte_carlo) {
        loss = 0.0;  // the histogram exhausts its samples by construction
    }
    return Posterior{std::move(mass), center, config.method, loss};
}

std::size_t default_sample_size(std::size_t expected_length, double peak_mass,
                                double gamma) {
    if (expected_length == 0) {
        throw ContractError("expected length must be positive");
    }
    if (!(peak_mass > 0.0) || !(peak_mass < 1.0)) {
        throw ContractError("peak mass must lie in (0, 1)");
    }
    if (!(gamma > 0.0)) {
        throw ContractError("gamma must be positive");
    }
    const double bound = std::ceil(static_cast<double>(expected_length) *
                                       peak_mass * (1.0 - peak_mass) /
                                       (gamma * gamma) +
                                   1.0);
    if (bound >= static_cast<double>(kMinSampleSize)) {
        return static_cast<std::size_t>(bound);
    }
    return kMinSampleSize;
}

}  // namespace dpinfer
