#include "dpinfer/noise.hpp"

#include <cmath>
#include <string>

namespace dpinfer {

namespace {

std::mt19937_64 make_engine(std::uint64_t master_seed, std::uint64_t stream_id) {
    std::seed_seq seq{
        static_cast<std::uint32_t>(master_seed),
        static_cast<std::uint32_t>(master_seed >> 32),
        static_cast<std::uint32_t>(stream_id),
        static_cast<std::uint32_t>(stream_id >> 32),
    };
    return std::mt19937_64(seq);
}

}  // namespace

NoiseSource::NoiseSource(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed),
      stream_id_(stream_id),
      engine_(make_engine(master_seed, stream_id)) {}

NoiseSource NoiseSource::stream(std::uint64_t stream_id) const {
    return NoiseSource(master_seed_, stream_id);
}

double NoiseSource::next_uniform() {
    // 53-bit mantissa shifted into (0, 1); avoids the endpoints so log() in
    // the inverse CDF stays finite.
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double sample_laplace(double alpha, double sensitivity, NoiseSource& source) {
    if (!(alpha > 0.0)) {
        throw ContractError("laplace budget must be positive, got " +
                            std::to_string(alpha));
    }
    if (!(sensitivity > 0.0)) {
        throw ContractError("sensitivity must be positive, got " +
                            std::to_string(sensitivity));
    }
    const double scale = sensitivity / alpha;
    const double v = source.next_uniform() - 0.5;  // in (-0.5, 0.5)
    const double sign = v < 0.0 ? -1.0 : 1.0;
    return -scale * sign * std::log(1.0 - 2.0 * std::abs(v));
}

double answer_query(const CountCube& cube, const LinearQuery& query,
                    double alpha, NoiseSource& source) {
    const double sensitivity = sensitivity_of(query);
    return true_answer(cube, query) + sample_laplace(alpha, sensitivity, source);
}

QueryHistory answer_history(const CountCube& cube,
                            const std::vector<LinearQuery>& queries,
                            const std::vector<double>& alphas,
                            const NoiseSource& source) {
    if (queries.size() != alphas.size()) {
        throw ShapeError("got " + std::to_string(queries.size()) +
                         " queries but " + std::to_string(alphas.size()) +
                         " budgets");
    }
    QueryHistory history;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        NoiseSource row_source = source.stream(i);
        const double sensitivity = sensitivity_of(queries[i]);
        const double noisy = true_answer(cube, queries[i]) +
                             sample_laplace(alphas[i], sensitivity, row_source);
        history.append({queries[i], noisy, alphas[i], sensitivity});
    }
    return history;
}

}  // namespace dpinfer
