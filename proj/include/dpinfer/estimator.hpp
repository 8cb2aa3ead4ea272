#ifndef DPINFER_ESTIMATOR_HPP_
#define DPINFER_ESTIMATOR_HPP_

#include <vector>

#include "dpinfer/core.hpp"

namespace dpinfer {

// Row of estimator weights A for a target query: the best linear unbiased
// estimate of the target is A . y over the history answers y.
struct EstimatorWeights {
    std::vector<double> weights;  // length = history row count
    LinearQuery target;
};

// Generalized-least-squares weight row minimizing the estimate's MSE among
// linear unbiased estimators. Each history row is weighted by
// (alpha/sensitivity)^2, the inverse of its noise variance up to a constant.
// Throws EstimabilityError when the history design has column rank < n.
//
// When `unit_weights` is set the rows are weighted equally instead
// (ordinary least squares); kept as a comparison hook for the benchmark.
EstimatorWeights estimator_matrix(const QueryHistory& history,
                                  const LinearQuery& target,
                                  bool unit_weights = false);

// A . y for this history's noisy answers.
double blue_point_estimate(const EstimatorWeights& weights,
                           const QueryHistory& history);

// Cell estimate vector: the generalized-least-squares solution for the whole
// cube, so that any target estimate is target . cells.
std::vector<double> estimate_cells(const QueryHistory& history);

// Variance (= MSE, the estimator is unbiased) of the BLUE for `target`:
// 2 * Q G^-1 Q^T with G the weighted Gram matrix of the history design.
double estimate_variance(const QueryHistory& history, const LinearQuery& target);

// Chebyshev bound: Pr(|theta - estimate| <= epsilon) >= 1 - returned value.
// Clamped to [0, 1].
double chebyshev_delta(double variance, double epsilon);

}  // namespace dpinfer

#endif  // DPINFER_ESTIMATOR_HPP_
