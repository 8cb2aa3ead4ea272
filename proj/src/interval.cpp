#include "dpinfer/interval.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dpinfer {

std::pair<double, double> credible_interval(const Posterior& posterior,
                                            double delta) {
    if (!(delta > 0.0) || !(delta < 1.0)) {
        throw ContractError("delta must lie in (0, 1)");
    }
    const ProbabilityMassVector& mass = posterior.mass;
    const double target = 1.0 - delta;
    const double attainable = mass.total_mass();
    if (target > attainable) {
        throw CoverageError(
            "confidence " + std::to_string(target) +
                " exceeds the posterior's total mass " +
                std::to_string(attainable),
            attainable);
    }

    double cumulative = mass.at_offset(0);
    int steps = 0;
    while (cumulative < target && steps < mass.max_offset()) {
        ++steps;
        // Both sides accumulate independently; sampling asymmetry in a
        // Monte Carlo posterior must not be double-counted.
        cumulative += mass.at_offset(-steps) + mass.at_offset(steps);
    }
    if (cumulative < target) {
        // total_mass() passed but bin-by-bin accumulation fell short by
        // roundoff; the full support is the answer.
        steps = mass.max_offset();
    }
    return {posterior.center_value - steps, posterior.center_value + steps};
}

namespace {

// Fraction of the unit-width bin [lo, lo+1] lying inside [a, b].
double overlap(double lo, double a, double b) {
    const double hi = lo + 1.0;
    return std::clamp(std::min(b, hi) - std::max(a, lo), 0.0, 1.0);
}

}  // namespace

double confidence_of(const Posterior& posterior, double lower, double upper) {
    if (!(lower <= upper)) {
        throw ContractError("interval bounds are reversed");
    }
    const ProbabilityMassVector& mass = posterior.mass;
    double total = 0.0;
    for (int o = mass.min_offset(); o <= mass.max_offset(); ++o) {
        const double bin_lo = posterior.center_value + o - 0.5;
        total += mass.at_offset(o) * overlap(bin_lo, lower, upper);
    }
    return total;
}

double tail_probability(const Posterior& posterior, double c) {
    const ProbabilityMassVector& mass = posterior.mass;
    double total = 0.0;
    for (int o = mass.min_offset(); o <= mass.max_offset(); ++o) {
        const double bin_lo = posterior.center_value + o - 0.5;
        total += mass.at_offset(o) *
                 std::clamp(bin_lo + 1.0 - std::max(c, bin_lo), 0.0, 1.0);
    }
    return total;
}

double tail_probability_below(const Posterior& posterior, double c) {
    const ProbabilityMassVector& mass = posterior.mass;
    double total = 0.0;
    for (int o = mass.min_offset(); o <= mass.max_offset(); ++o) {
        const double bin_lo = posterior.center_value + o - 0.5;
        total += mass.at_offset(o) *
                 std::clamp(std::min(c, bin_lo + 1.0) - bin_lo, 0.0, 1.0);
    }
    return total;
}

}  // namespace dpinfer
