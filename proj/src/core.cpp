#include "dpinfer/core.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace dpinfer {

CountCube::CountCube(std::vector<std::int64_t> counts)
    : counts_(std::move(counts)) {
    if (counts_.empty()) {
        throw ShapeError("a count cube needs at least one cell");
    }
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        if (counts_[i] < 0) {
            throw ContractError("cell " + std::to_string(i) +
                                " has negative count " +
                                std::to_string(counts_[i]));
        }
    }
}

LinearQuery::LinearQuery(std::vector<double> coefficients)
    : coefficients_(std::move(coefficients)) {
    if (coefficients_.empty()) {
        throw ShapeError("a linear query needs at least one coefficient");
    }
    for (double c : coefficients_) {
        if (!std::isfinite(c)) {
            throw ContractError("query coefficients must be finite");
        }
    }
}

UtilityRequirement::UtilityRequirement(double epsilon_in, double delta_in)
    : epsilon(epsilon_in), delta(delta_in) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw ContractError("epsilon must be positive");
    }
    if (!(delta > 0.0) || !(delta < 1.0)) {
        throw ContractError("delta must lie in (0, 1)");
    }
}

QueryHistory::QueryHistory(std::vector<HistoryRow> rows) {
    for (auto& row : rows) {
        append(std::move(row));
    }
}

void QueryHistory::check_row(const HistoryRow& row) const {
    if (!rows_.empty() && row.query.size() != dimension_) {
        throw ShapeError("history row has dimension " +
                         std::to_string(row.query.size()) + ", expected " +
                         std::to_string(dimension_));
    }
    if (!(row.alpha > 0.0)) {
        throw ContractError("history row budget must be positive");
    }
    if (row.sensitivity != sensitivity_of(row.query)) {
        throw ContractError(
            "history row sensitivity does not match its coefficients");
    }
}

void QueryHistory::append(HistoryRow row) {
    check_row(row);
    if (rows_.empty()) {
        dimension_ = row.query.size();
    }
    rows_.push_back(std::move(row));
}

double sensitivity_of(const LinearQuery& query) {
    double max_abs = 0.0;
    for (double c : query.coefficients()) {
        max_abs = std::max(max_abs, std::abs(c));
    }
    if (max_abs == 0.0) {
        throw DegenerateQueryError(
            "all query coefficients are zero; the noise scale is undefined");
    }
    return max_abs;
}

double true_answer(const CountCube& cube, const LinearQuery& query) {
    if (cube.size() != query.size()) {
        throw ShapeError("query has " + std::to_string(query.size()) +
                         " coefficients for a cube of " +
                         std::to_string(cube.size()) + " cells");
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < cube.size(); ++j) {
        sum += query.coefficient(j) * static_cast<double>(cube.count(j));
    }
    return sum;
}

namespace {

bool is_blank(const std::string& line) {
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

CountCube load_cube(std::istream& in) {
    std::vector<std::int64_t> counts;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (is_blank(line)) {
            // A blank final line is just the trailing newline.
            if (in.peek() == std::char_traits<char>::eof()) break;
            throw ParseError("cube line " + std::to_string(line_number) +
                             ": blank line");
        }
        const char* begin = line.c_str();
        char* end = nullptr;
        errno = 0;
        long long value = std::strtoll(begin, &end, 10);
        while (end && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
        if (end == begin || (end && *end != '\0') || errno != 0) {
            throw ParseError("cube line " + std::to_string(line_number) +
                             ": expected a nonnegative integer, got \"" + line +
                             "\"");
        }
        if (value < 0) {
            throw ParseError("cube line " + std::to_string(line_number) +
                             ": negative count " + std::to_string(value));
        }
        counts.push_back(value);
    }
    if (counts.empty()) {
        throw ParseError("cube file is empty");
    }
    return CountCube(std::move(counts));
}

}  // namespace dpinfer
