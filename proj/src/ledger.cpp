#include "dpinfer/ledger.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dpinfer {

double BudgetLedger::alpha_bar() const {
    double max = 0.0;
    for (double b : per_cell) max = std::max(max, b);
    return max;
}

double allocate_budget(double sensitivity, double epsilon, double delta) {
    if (!(sensitivity > 0.0)) {
        throw ContractError("sensitivity must be positive");
    }
    if (!(epsilon > 0.0)) {
        throw ContractError("epsilon must be positive");
    }
    if (!(delta > 0.0) || !(delta < 1.0)) {
        throw ContractError("delta must lie in (0, 1)");
    }
    return sensitivity * std::log(1.0 / delta) / epsilon;
}

SystemCost system_cost(const QueryHistory& history) {
    SystemCost cost{std::vector<double>(history.dimension(), 0.0), 0.0};
    for (const HistoryRow& row : history.rows()) {
        const double rate = row.alpha / row.sensitivity;
        for (std::size_t j = 0; j < cost.per_cell.size(); ++j) {
            cost.per_cell[j] += rate * std::abs(row.query.coefficient(j));
        }
    }
    for (double b : cost.per_cell) cost.alpha_bar = std::max(cost.alpha_bar, b);
    return cost;
}

AdmitDecision admit(const BudgetLedger& ledger, const QueryHistory& history,
                    const LinearQuery& candidate, double candidate_alpha) {
    if (!(candidate_alpha > 0.0)) {
        throw ContractError("candidate budget must be positive, got " +
                            std::to_string(candidate_alpha));
    }
    if (!history.empty() && candidate.size() != history.dimension()) {
        throw ShapeError("candidate query has " +
                         std::to_string(candidate.size()) +
                         " coefficients for a history of dimension " +
                         std::to_string(history.dimension()));
    }
    if (candidate.size() != ledger.per_cell.size()) {
        throw ShapeError("candidate query does not match the ledger's cells");
    }

    const double rate = candidate_alpha / sensitivity_of(candidate);
    double worst = 0.0;
    for (std::size_t j = 0; j < ledger.per_cell.size(); ++j) {
        worst = std::max(
            worst,
            ledger.per_cell[j] + rate * std::abs(candidate.coefficient(j)));
    }
    if (worst <= ledger.bound) {
        return {true, 0.0};
    }
    return {false, worst - ledger.bound};
}

}  // namespace dpinfer
