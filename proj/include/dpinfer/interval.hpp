#ifndef DPINFER_INTERVAL_HPP_
#define DPINFER_INTERVAL_HPP_

#include <utility>

#include "dpinfer/inference.hpp"

namespace dpinfer {

// Credible interval with confidence 1 - delta: expands one bin per side from
// the center until the accumulated mass reaches 1 - delta, so the interval
// is symmetric about the center value and minimal among bin-aligned
// symmetric intervals. Throws CoverageError (naming the attainable maximum)
// when 1 - delta exceeds the posterior's total mass.
std::pair<double, double> credible_interval(const Posterior& posterior,
                                            double delta);

// Posterior mass inside [lower, upper]. Bins partially covered count
// proportionally (mass is uniform within a bin).
double confidence_of(const Posterior& posterior, double lower, double upper);

// Posterior mass strictly above c; partial bins proportional.
double tail_probability(const Posterior& posterior, double c);

// Posterior mass strictly below c; partial bins proportional.
double tail_probability_below(const Posterior& posterior, double c);

}  // namespace dpinfer

#endif  // DPINFER_INTERVAL_HPP_
