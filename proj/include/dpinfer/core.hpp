#ifndef DPINFER_CORE_HPP_
#define DPINFER_CORE_HPP_

#include <cstdint>
#include <istream>
#include <vector>

#include "dpinfer/errors.hpp"

namespace dpinfer {

// Dense vector of nonnegative cell counts. Cell index is the row-major
// position in the flattened attribute grid; attribute metadata is not kept.
class CountCube {
public:
    explicit CountCube(std::vector<std::int64_t> counts);

    std::size_t size() const { return counts_.size(); }
    std::int64_t count(std::size_t cell) const { return counts_[cell]; }
    const std::vector<std::int64_t>& counts() const { return counts_; }

private:
    std::vector<std::int64_t> counts_;
};

// A linear counting query: one real coefficient per cube cell. Queries are
// stored dense. An all-zero query is representable (so it can be rejected
// where it matters) but cannot be answered or given a sensitivity.
class LinearQuery {
public:
    explicit LinearQuery(std::vector<double> coefficients);

    std::size_t size() const { return coefficients_.size(); }
    double coefficient(std::size_t cell) const { return coefficients_[cell]; }
    const std::vector<double>& coefficients() const { return coefficients_; }

private:
    std::vector<double> coefficients_;
};

// (epsilon, delta) utility requirement: the returned interval may be at most
// 2*epsilon long and must contain the true answer with confidence 1 - delta.
struct UtilityRequirement {
    double epsilon;
    double delta;

    UtilityRequirement(double epsilon, double delta);
};

// One answered query: coefficients, noisy answer, the budget it was answered
// at, and its sensitivity (always the max absolute coefficient).
struct HistoryRow {
    LinearQuery query;
    double noisy_answer;
    double alpha;
    double sensitivity;
};

// Aligned records of past queries. All rows share one cube dimension n.
class QueryHistory {
public:
    QueryHistory() = default;
    explicit QueryHistory(std::vector<HistoryRow> rows);

    void append(HistoryRow row);

    std::size_t row_count() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }
    // Cube dimension shared by all rows; 0 for an empty history.
    std::size_t dimension() const { return dimension_; }
    const HistoryRow& row(std::size_t i) const { return rows_[i]; }
    const std::vector<HistoryRow>& rows() const { return rows_; }

private:
    void check_row(const HistoryRow& row) const;

    std::vector<HistoryRow> rows_;
    std::size_t dimension_ = 0;
};

// Sensitivity of a linear query: max_j |Q_j|. Throws DegenerateQueryError if
// every coefficient is zero.
double sensitivity_of(const LinearQuery& query);

// Exact (non-private) answer: the dot product of coefficients and counts.
double true_answer(const CountCube& cube, const LinearQuery& query);

// Reads a cube from its file form: one nonnegative integer per line, cell
// index = line number - 1. Parse errors report the line number.
CountCube load_cube(std::istream& in);

}  // namespace dpinfer

#endif  // DPINFER_CORE_HPP_
