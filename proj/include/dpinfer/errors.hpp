#ifndef DPINFER_ERRORS_HPP_
#define DPINFER_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace dpinfer {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mismatched dimensions between cubes, queries, and histories.
struct ShapeError : Error {
    using Error::Error;
};

// Parameter outside its documented domain (nonpositive budget, even
// probability-mass-vector length, sample size below the floor, ...).
struct ContractError : Error {
    using Error::Error;
};

// Query with no nonzero coefficient; its noise scale would be undefined.
struct DegenerateQueryError : ContractError {
    using ContractError::ContractError;
};

// Malformed input file. The message carries the offending line or field.
struct ParseError : Error {
    using Error::Error;
};

// History design matrix does not have full column rank, so the target
// cannot be estimated without bias.
struct EstimabilityError : Error {
    using Error::Error;
};

// Requested confidence level exceeds the total mass of the posterior.
// attainable() reports the largest achievable confidence.
class CoverageError : public Error {
public:
    CoverageError(const std::string& what, double attainable)
        : Error(what), attainable_(attainable) {}
    double attainable() const { return attainable_; }

private:
    double attainable_;
};

}  // namespace dpinfer

#endif  // DPINFER_ERRORS_HPP_
