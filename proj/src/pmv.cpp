#include "dpinfer/pmv.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dpinfer {

namespace {

// Running compensated (Kahan) sum.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double value) {
        const double y = value - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

constexpr double kMassSlack = 1e-9;  // tolerance on the [0,1] mass checks

}  // namespace

ProbabilityMassVector::ProbabilityMassVector(std::vector<double> masses)
    : masses_(std::move(masses)) {
    if (masses_.empty() || masses_.size() % 2 == 0) {
        throw ContractError("mass vector length must be odd, got " +
                            std::to_string(masses_.size()));
    }
    half_ = static_cast<int>((masses_.size() - 1) / 2);
    KahanSum total;
    for (double m : masses_) {
        if (!(m >= -kMassSlack) || !(m <= 1.0 + kMassSlack)) {
            throw ContractError("bin mass " + std::to_string(m) +
                                " is outside [0, 1]");
        }
        total.add(m);
    }
    if (total.sum > 1.0 + kMassSlack) {
        throw ContractError("masses sum to " + std::to_string(total.sum) +
                            " > 1");
    }
}

ProbabilityMassVector ProbabilityMassVector::point_mass() {
    return ProbabilityMassVector({1.0});
}

double ProbabilityMassVector::at_offset(int o) const {
    if (o < -half_ || o > half_) return 0.0;
    return masses_[static_cast<std::size_t>(o + half_)];
}

double ProbabilityMassVector::total_mass() const {
    KahanSum total;
    for (double m : masses_) total.add(m);
    return total.sum;
}

double ProbabilityMassVector::peak_mass() const {
    return *std::max_element(masses_.begin(), masses_.end());
}

ProbabilityMassVector convolve(const ProbabilityMassVector& u,
                               const ProbabilityMassVector& v) {
    const auto& a = u.masses();
    const auto& b = v.masses();
    // Scatter form: bin k accumulates a[j] * b[k - j] in ascending j with a
    // per-bin compensation term. Consecutive iterations touch different
    // bins, so the compensated updates pipeline instead of serializing.
    std::vector<double> sum(a.size() + b.size() - 1, 0.0);
    std::vector<double> carry(sum.size(), 0.0);
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double aj = a[j];
        for (std::size_t i = 0; i < b.size(); ++i) {
            const std::size_t k = j + i;
            const double y = aj * b[i] - carry[k];
            const double t = sum[k] + y;
            carry[k] = (t - sum[k]) - y;
            sum[k] = t;
        }
    }
    return ProbabilityMassVector(std::move(sum));
}

ProbabilityMassVector laplace_pmv(double alpha, double sensitivity,
                                  double coefficient, std::size_t length) {
    if (!(alpha > 0.0) || !(sensitivity > 0.0)) {
        throw ContractError("laplace_pmv needs positive budget and sensitivity");
    }
    if (length == 0 || length % 2 == 0) {
        throw ContractError("mass vector length must be odd, got " +
                            std::to_string(length));
    }
    if (coefficient == 0.0) {
        if (length != 1) {
            throw ContractError(
                "a zero coefficient contributes no noise; length must be 1");
        }
        return ProbabilityMassVector::point_mass();
    }

    const double scale = std::abs(coefficient) * sensitivity / alpha;
    const std::size_t half = (length - 1) / 2;
    std::vector<double> masses(length, 0.0);
    // Build the right half and mirror it, so the vector is symmetric to the
    // last bit. The CDF increment at offset o is e^{-o/b} sinh(1/(2b));
    // the product form avoids cancelling two nearby exponentials when the
    // scale is large.
    masses[half] = -std::expm1(-0.5 / scale);
    const double bin_factor = std::sinh(0.5 / scale);
    for (std::size_t o = 1; o <= half; ++o) {
        const double mass =
            std::exp(-static_cast<double>(o) / scale) * bin_factor;
        masses[half + o] = mass;
        masses[half - o] = mass;
    }
    return ProbabilityMassVector(std::move(masses));
}

double pmv_error(const ProbabilityMassVector& u,
                 const ProbabilityMassVector& reference) {
    const int half = std::max(u.max_offset(), reference.max_offset());
    KahanSum total;
    for (int o = -half; o <= half; ++o) {
        const double d = u.at_offset(o) - reference.at_offset(o);
        total.add(d * d);
    }
    return total.sum;
}

namespace {

// Integrand of the iid-Laplace-sum density in log space; the prefactor is
// folded in so each evaluation stays in floating range even for large count.
double gamma_sum_integrand(std::size_t count, double alpha, double abs_z,
                           double log_prefactor, double v) {
    if (v <= 0.0) {
        return count == 1 ? std::exp(log_prefactor) : 0.0;
    }
    const double n1 = static_cast<double>(count) - 1.0;
    return std::exp(log_prefactor + n1 * std::log(v) +
                    n1 * std::log(abs_z + v / (2.0 * alpha)) - v);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double bilateral_gamma_pdf(std::size_t count, double alpha, double z) {
    if (count == 0) {
        throw ContractError("count must be at least 1");
    }
    if (!(alpha > 0.0)) {
        throw ContractError("alpha must be positive");
    }
    const double n = static_cast<double>(count);
    const double abs_z = std::abs(z);
    const double log_prefactor = n * std::log(alpha) - n * std::log(2.0) -
                                 2.0 * std::lgamma(n) - alpha * abs_z;
    const auto f = [&](double v) {
        return gamma_sum_integrand(count, alpha, abs_z, log_prefactor, v);
    };

    // e^{-v} makes anything beyond this cutoff smaller than 1e-20 relative.
    const double upper = 60.0 + 10.0 * n;
    const double fa = f(0.0);
    const double fb = f(upper);
    const double mid = 0.5 * upper;
    const double fm = f(mid);
    const double whole = upper / 6.0 * (fa + 4.0 * fm + fb);
    // Scale-free tolerance: the integral is within a few orders of the
    // peak integrand times the e^{-v} width.
    double peak = fm;
    for (double v = 0.25; v < upper; v *= 2.0) peak = std::max(peak, f(v));
    const double tol = std::max(peak, 1e-300) * 1e-9;
    return adaptive_simpson(f, 0.0, upper, fa, fm, fb, whole, tol, 48);
}

}  // namespace dpinfer
