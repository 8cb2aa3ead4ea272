#ifndef DPINFER_PMV_HPP_
#define DPINFER_PMV_HPP_

#include <cstddef>
#include <vector>

#include "dpinfer/errors.hpp"

namespace dpinfer {

// Discretized distribution on unit-width bins centered at integer offsets.
// A vector of odd length L covers offsets -(L-1)/2 .. (L-1)/2; the bin at
// offset o holds the probability mass of (o - 1/2, o + 1/2]. Masses sum to
// at most 1; the shortfall is the truncation loss.
class ProbabilityMassVector {
public:
    // Takes ownership of the masses; length must be odd, each mass in [0,1].
    explicit ProbabilityMassVector(std::vector<double> masses);

    // The trivial distribution: all mass in the offset-0 bin.
    static ProbabilityMassVector point_mass();

    std::size_t length() const { return masses_.size(); }
    int min_offset() const { return -half_; }
    int max_offset() const { return half_; }

    double at_index(std::size_t i) const { return masses_[i]; }
    // Mass of the bin at integer offset o; 0 outside the vector.
    double at_offset(int o) const;

    // Compensated sum of all masses.
    double total_mass() const;
    double loss() const { return 1.0 - total_mass(); }
    double peak_mass() const;

    const std::vector<double>& masses() const { return masses_; }

private:
    std::vector<double> masses_;
    int half_;
};

// Direct convolution: the mass vector of the sum of two independent
// discretized variables. |w| = |u| + |v| - 1; sum(w) = sum(u) * sum(v).
// Inner products use compensated summation in a fixed order.
ProbabilityMassVector convolve(const ProbabilityMassVector& u,
                               const ProbabilityMassVector& v);

// Mass vector of coefficient * Laplace(alpha/sensitivity) truncated to
// `length` bins: bin mass is the CDF increment of the scaled-Laplace
// distribution with scale |coefficient| * sensitivity / alpha. The
// truncation loss is exp(-alpha * length / (2 |coefficient| sensitivity)).
// A zero coefficient is a point mass and requires length 1.
ProbabilityMassVector laplace_pmv(double alpha, double sensitivity,
                                  double coefficient, std::size_t length);

// Sum of squared per-bin deviations from `reference`. The shorter vector is
// zero-padded symmetrically; both are centered at offset 0 by construction.
double pmv_error(const ProbabilityMassVector& u,
                 const ProbabilityMassVector& reference);

// Density at z of the sum of `count` iid Laplace(rate alpha) variables,
// by adaptive quadrature of its single-integral form to relative tolerance
// 1e-8. Used as an independent oracle for convolution results.
double bilateral_gamma_pdf(std::size_t count, double alpha, double z);

}  // namespace dpinfer

#endif  // DPINFER_PMV_HPP_
