#ifndef DPINFER_INFERENCE_HPP_
#define DPINFER_INFERENCE_HPP_

#include <cstddef>
#include <vector>

#include "dpinfer/estimator.hpp"
#include "dpinfer/noise.hpp"
#include "dpinfer/pmv.hpp"

namespace dpinfer {

enum class PosteriorMethod {
    monte_carlo,
    probability_calculation,
};

// Posterior belief over the target's true answer. The bin at offset o
// represents theta in (center_value + o - 1/2, center_value + o + 1/2].
struct Posterior {
    ProbabilityMassVector mass;
    double center_value;  // the point estimate A . y
    PosteriorMethod method;
    double loss;  // 1 - sum(mass): <= gamma for PC, 0 for MC
};

// Minimum Monte Carlo sample size accepted by mc_noise_pmv.
inline constexpr std::size_t kMinSampleSize = 10000;

// Monte Carlo mass vector of the weighted noise sum A . N: draws
// `sample_size` variates per history row (row k on stream k of `source`),
// rounds the weighted sums to integers and histograms them over the
// symmetric range that covers every sample. Masses sum to 1.
ProbabilityMassVector mc_noise_pmv(const EstimatorWeights& weights,
                                   const QueryHistory& history,
                                   std::size_t sample_size,
                                   const NoiseSource& source);

// Per-row vector lengths for the probability-calculation method, chosen so
// each row's truncation loss is gamma / m: ceil(2 |A_k| S_k ln(m/gamma) /
// alpha_k), bumped to odd. Rows with zero weight get length 1.
std::vector<std::size_t> pc_lengths(const EstimatorWeights& weights,
                                    const QueryHistory& history, double gamma);

// Deterministic mass vector of A . N: the convolution of every row's
// truncated Laplace vector, shortest first. Total truncation loss <= gamma.
ProbabilityMassVector pc_noise_pmv(const EstimatorWeights& weights,
                                   const QueryHistory& history, double gamma);

struct InferenceConfig {
    PosteriorMethod method = PosteriorMethod::probability_calculation;
    double gamma = 0.01;                      // PC loss budget
    std::size_t sample_size = kMinSampleSize; // MC sample count
};

// Posterior over theta: the noise mass vector reflected about offset 0
// (theta = A.y - A.N) and recentered at the point estimate A . y.
Posterior posterior_of(const EstimatorWeights& weights,
                       const QueryHistory& history,
                       const InferenceConfig& config,
                       const NoiseSource& source);

// Sample size needed to push the expected Monte Carlo error below gamma^2:
// max(10^4, ceil(expected_length * peak_mass * (1 - peak_mass) / gamma^2 + 1)).
std::size_t default_sample_size(std::size_t expected_length, double peak_mass,
                                double gamma);

}  // namespace dpinfer

#endif  // DPINFER_INFERENCE_HPP_
