#ifndef DPINFER_NOISE_HPP_
#define DPINFER_NOISE_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "dpinfer/core.hpp"

namespace dpinfer {

// Deterministic random source. The same (master_seed, stream_id) pair always
// yields the same variate sequence; distinct stream ids give independent
// streams, so per-row generation can be reordered or parallelized without
// changing any output.
class NoiseSource {
public:
    explicit NoiseSource(std::uint64_t master_seed, std::uint64_t stream_id = 0);

    // A fresh source on stream `stream_id` of the same master seed.
    NoiseSource stream(std::uint64_t stream_id) const;

    // Uniform variate in the open interval (0, 1).
    double next_uniform();

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
};

// One Laplace variate with rate alpha/sensitivity (mean 0, variance
// 2*(sensitivity/alpha)^2), by inverse-CDF transform of a uniform variate.
double sample_laplace(double alpha, double sensitivity, NoiseSource& source);

// Differentially private answer: true answer plus Laplace noise scaled to
// the query's sensitivity.
double answer_query(const CountCube& cube, const LinearQuery& query,
                    double alpha, NoiseSource& source);

// Answers every query and assembles the rows into a history. Row i draws
// from stream i of `source`, so rows are mutually independent and the result
// depends only on (cube, queries, alphas, master seed).
QueryHistory answer_history(const CountCube& cube,
                            const std::vector<LinearQuery>& queries,
                            const std::vector<double>& alphas,
                            const NoiseSource& source);

}  // namespace dpinfer

#endif  // DPINFER_NOISE_HPP_
