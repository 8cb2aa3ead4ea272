#ifndef DPINFER_LEDGER_HPP_
#define DPINFER_LEDGER_HPP_

#include <vector>

#include "dpinfer/core.hpp"

namespace dpinfer {

// Per-cell privacy spending and the system-wide bound. The guarantee is
// conditional on cells being independent or negatively correlated; the
// ledger declares that assumption, it cannot enforce it.
struct BudgetLedger {
    std::vector<double> per_cell;  // accumulated budget per cube cell
    double bound;                  // overall budget; may be infinity

    // Current system privacy cost: the largest per-cell spending.
    double alpha_bar() const;
};

// Minimum budget that makes a fresh Laplace answer meet the (epsilon, delta)
// requirement: sensitivity * ln(1/delta) / epsilon. The allocation is tight:
// Pr(|noise| <= epsilon) = 1 - delta exactly at this rate.
double allocate_budget(double sensitivity, double epsilon, double delta);

struct SystemCost {
    std::vector<double> per_cell;
    double alpha_bar;
};

// Accumulated privacy cost of a history: per_cell[j] = sum over rows of
// (alpha_i / S_i) * |H_ij|; alpha_bar is the maximum entry. Rows accumulate
// in order, so appending a row and recomputing matches an incremental update
// bit for bit.
SystemCost system_cost(const QueryHistory& history);

struct AdmitDecision {
    bool admitted;
    double excess;  // overshoot past the bound when rejected, else 0

    explicit operator bool() const { return admitted; }
};

// Whether answering `candidate` at `candidate_alpha` keeps every per-cell
// spending within the ledger's bound; reports the overshoot when not.
AdmitDecision admit(const BudgetLedger& ledger, const QueryHistory& history,
                    const LinearQuery& candidate, double candidate_alpha);

}  // namespace dpinfer

#endif  // DPINFER_LEDGER_HPP_
