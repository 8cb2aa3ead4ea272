#include "dpinfer/engine.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "dpinfer/estimator.hpp"
#include "dpinfer/interval.hpp"

namespace dpinfer {

namespace {

// Distinct master seed for inference-side sampling, so Monte Carlo posterior
// draws never reuse the streams that produced the history noise itself.
std::uint64_t inference_seed(std::uint64_t master_seed) {
    return master_seed ^ 0xd1b54a32d192ed03ULL;
}

}  // namespace

Engine::Engine(CountCube cube, double budget_bound, EngineConfig config,
               NoiseSource source, QueryHistory initial_history)
    : cube_(std::move(cube)),
      history_(std::move(initial_history)),
      ledger_{},
      config_(config),
      source_(std::move(source)),
      next_stream_(history_.row_count()) {
    if (!(budget_bound > 0.0)) {
        throw ContractError("budget bound must be positive");
    }
    if (!history_.empty() && history_.dimension() != cube_.size()) {
        throw ShapeError("initial history dimension does not match the cube");
    }
    const SystemCost cost = system_cost(history_);
    ledger_.per_cell = cost.per_cell;
    ledger_.per_cell.resize(cube_.size(), 0.0);
    ledger_.bound = budget_bound;
    if (ledger_.alpha_bar() > budget_bound) {
        throw ContractError("initial history already exceeds the budget bound");
    }
}

QueryResponse Engine::infer_from_history(const LinearQuery& query,
                                         const UtilityRequirement& requirement,
                                         bool& served) {
    served = false;
    std::optional<EstimatorWeights> weights;
    try {
        weights = estimator_matrix(history_, query, config_.ols_weights);
    } catch (const EstimabilityError&) {
        return {};  // an unestimable target can never be served from history
    }

    if (config_.inference.method == PosteriorMethod::probability_calculation) {
        // The interval must reach confidence 1 - delta within +-floor(eps)
        // bins. Mass that close to center cannot exceed what the single
        // widest Laplace term alone would concentrate there, so when even
        // that term's CDF falls short the convolution is pointless.
        double widest = 0.0;
        for (std::size_t k = 0; k < history_.row_count(); ++k) {
            const HistoryRow& row = history_.row(k);
            widest = std::max(widest, std::abs(weights->weights[k]) *
                                          row.sensitivity / row.alpha);
        }
        const double reach = std::floor(requirement.epsilon) + 0.5;
        if (widest > 0.0 &&
            std::exp(-reach / widest) > requirement.delta) {
            return {};
        }
    }

    try {
        const Posterior posterior =
            posterior_of(*weights, history_, config_.inference,
                         NoiseSource(inference_seed(source_.master_seed())));
        auto [lower, upper] = credible_interval(posterior, requirement.delta);
        // The bin-aligned endpoints cut the two edge bins in half, so a
        // narrow interval can hold less real mass than the bins it counted.
        // Serve only an interval whose contained mass truly reaches the
        // confidence level, widening bin by bin while it still fits 2 eps.
        const double full_span =
            2.0 * (posterior.mass.max_offset() + 1);  // beyond all support
        while (upper - lower <= 2.0 * requirement.epsilon &&
               upper - lower <= full_span &&
               confidence_of(posterior, lower, upper) <
                   1.0 - requirement.delta) {
            lower -= 1.0;
            upper += 1.0;
        }
        if (confidence_of(posterior, lower, upper) < 1.0 - requirement.delta) {
            return {};
        }
        if (upper - lower <= 2.0 * requirement.epsilon) {
            served = true;
            return {posterior.center_value, lower, upper,
                    ServedFrom::history_inference, 0.0};
        }
    } catch (const CoverageError&) {
        // Posterior truncation loss exceeds the confidence head-room; the
        // mechanism will have to answer.
    }
    return {};
}

QueryResponse Engine::answer(const LinearQuery& query,
                             const UtilityRequirement& requirement) {
    if (query.size() != cube_.size()) {
        throw ShapeError("query has " + std::to_string(query.size()) +
                         " coefficients for a cube of " +
                         std::to_string(cube_.size()) + " cells");
    }
    const double sensitivity = sensitivity_of(query);

    if (config_.use_inference && !history_.empty()) {
        bool served = false;
        QueryResponse response = infer_from_history(query, requirement, served);
        if (served) return response;
    }

    const double alpha =
        allocate_budget(sensitivity, requirement.epsilon, requirement.delta);
    const AdmitDecision decision = admit(ledger_, history_, query, alpha);
    if (!decision) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        return {nan, nan, nan, ServedFrom::rejected, 0.0};
    }

    NoiseSource row_source = source_.stream(next_stream_++);
    const double noisy = answer_query(cube_, query, alpha, row_source);
    history_.append({query, noisy, alpha, sensitivity});
    const double rate = alpha / sensitivity;
    for (std::size_t j = 0; j < ledger_.per_cell.size(); ++j) {
        ledger_.per_cell[j] += rate * std::abs(query.coefficient(j));
    }
    return {noisy, noisy - requirement.epsilon, noisy + requirement.epsilon,
            ServedFrom::fresh_mechanism, alpha};
}

std::vector<QueryResponse> Engine::run_session(
    const std::vector<Request>& requests) {
    std::vector<QueryResponse> responses;
    responses.reserve(requests.size());
    for (const Request& request : requests) {
        responses.push_back(answer(request.query, request.requirement));
    }
    return responses;
}

}  // namespace dpinfer
