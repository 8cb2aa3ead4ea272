#ifndef DPINFER_ENGINE_HPP_
#define DPINFER_ENGINE_HPP_

#include <cstdint>
#include <vector>

#include "dpinfer/core.hpp"
#include "dpinfer/inference.hpp"
#include "dpinfer/ledger.hpp"
#include "dpinfer/noise.hpp"

namespace dpinfer {

enum class ServedFrom {
    history_inference,
    fresh_mechanism,
    rejected,
};

struct QueryResponse {
    double estimate;  // NaN when rejected
    double lower;
    double upper;
    ServedFrom served_from;
    double alpha_spent;  // 0 unless served by the fresh mechanism
};

struct EngineConfig {
    InferenceConfig inference;
    // Baseline mode: skip history inference and always go to the mechanism.
    bool use_inference = true;
    // Comparison hook: estimate with ordinary (unit-weight) least squares.
    bool ols_weights = false;
};

// Utility-driven query answering. A query is served from the history when
// the posterior's credible interval already meets the requirement; only
// otherwise is fresh budget allocated, and only if the ledger admits it.
// One engine is one logical writer; answers mutate the history and ledger.
class Engine {
public:
    Engine(CountCube cube, double budget_bound, EngineConfig config,
           NoiseSource source, QueryHistory initial_history = {});

    // Answers one query at the given requirement. Never exceeds the budget
    // bound: the query is rejected instead.
    QueryResponse answer(const LinearQuery& query,
                         const UtilityRequirement& requirement);

    struct Request {
        LinearQuery query;
        UtilityRequirement requirement;
    };

    // Folds answer() over the requests; a rejection does not stop the run.
    std::vector<QueryResponse> run_session(const std::vector<Request>& requests);

    const CountCube& cube() const { return cube_; }
    const QueryHistory& history() const { return history_; }
    const BudgetLedger& ledger() const { return ledger_; }

private:
    QueryResponse infer_from_history(const LinearQuery& query,
                                     const UtilityRequirement& requirement,
                                     bool& served);

    CountCube cube_;
    QueryHistory history_;
    BudgetLedger ledger_;
    EngineConfig config_;
    NoiseSource source_;
    std::uint64_t next_stream_;
};

}  // namespace dpinfer

#endif  // DPINFER_ENGINE_HPP_
