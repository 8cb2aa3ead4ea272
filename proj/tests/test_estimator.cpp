#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "dpinfer/estimator.hpp"
#include "dpinfer/noise.hpp"
#include "test_support.hpp"

using namespace dpinfer;

namespace {

// Exact rational solution of the running example's normal equations,
// computed independently with fraction arithmetic:
//   A = [31/65, 39/107, -7/214, 53/107, -3478/6955, 17/65, 15/214, 1658/6955]
const std::vector<double> kExactWeights = {
    31.0 / 65.0,   39.0 / 107.0, -7.0 / 214.0,  53.0 / 107.0,
    -3478.0 / 6955.0, 17.0 / 65.0,  15.0 / 214.0, 1658.0 / 6955.0};
const std::vector<double> kExactCells = {
    24.99230769230769, 10.176923076923076, 17.021495327102805,
    19.501869158878506};
constexpr double kExactEstimate = 42.013803019410496;
constexpr double kExactVariance = 554.4500359453631;

QueryHistory identity_history(const std::vector<double>& alphas,
                              const std::vector<double>& answers) {
    QueryHistory history;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        std::vector<double> row(alphas.size(), 0.0);
        row[i] = 1.0;
        history.append({LinearQuery(row), answers[i], alphas[i], 1.0});
    }
    return history;
}

}  // namespace

TEST_CASE("running example weight row") {
    const QueryHistory history = test::example_history();
    const EstimatorWeights weights =
        estimator_matrix(history, test::example_target());
    REQUIRE(weights.weights.size() == 8);
    // two-decimal form of the weight row
    const std::vector<double> rounded = {0.48, 0.36, -0.03, 0.50,
                                         -0.50, 0.26, 0.07, 0.24};
    for (std::size_t k = 0; k < 8; ++k) {
        CHECK(std::abs(weights.weights[k] - rounded[k]) < 0.005);
        CHECK(weights.weights[k] ==
              doctest::Approx(kExactWeights[k]).epsilon(1e-12));
    }
}

TEST_CASE("running example estimates") {
    const QueryHistory history = test::example_history();
    const std::vector<double> cells = estimate_cells(history);
    REQUIRE(cells.size() == 4);
    for (std::size_t j = 0; j < 4; ++j) {
        CHECK(cells[j] == doctest::Approx(kExactCells[j]).epsilon(1e-10));
    }
    const EstimatorWeights weights =
        estimator_matrix(history, test::example_target());
    CHECK(blue_point_estimate(weights, history) ==
          doctest::Approx(kExactEstimate).epsilon(1e-12));
    CHECK(estimate_variance(history, test::example_target()) ==
          doctest::Approx(kExactVariance).epsilon(1e-12));
}

TEST_CASE("identity design passes the target through") {
    const QueryHistory history =
        identity_history({0.3, 0.7, 0.2, 0.9}, {10, 20, 20, 10});
    const LinearQuery target({2, -1, 0, 3});
    const EstimatorWeights weights = estimator_matrix(history, target);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(weights.weights[k] ==
              doctest::Approx(target.coefficient(k)).epsilon(1e-12));
    }
    CHECK(blue_point_estimate(weights, history) ==
          doctest::Approx(2 * 10 - 20 + 3 * 10).epsilon(1e-12));
}

TEST_CASE("two repeated measurements average with squared-budget weights") {
    const double a = 0.35;
    QueryHistory history;
    history.append({LinearQuery({1.0}), 10.0, a, 1.0});
    history.append({LinearQuery({1.0}), 20.0, 2 * a, 1.0});
    const EstimatorWeights weights =
        estimator_matrix(history, LinearQuery({1.0}));
    CHECK(weights.weights[0] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(weights.weights[1] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(blue_point_estimate(weights, history) ==
          doctest::Approx(18.0).epsilon(1e-12));
}

TEST_CASE("variance basics") {
    QueryHistory history;
    const double a = 1.7;
    history.append({LinearQuery({1.0}), 5.0, a, 1.0});
    CHECK(estimate_variance(history, LinearQuery({1.0})) ==
          doctest::Approx(2.0 / (a * a)).epsilon(1e-12));

    // doubling every budget divides the variance by exactly four
    const QueryHistory example = test::example_history();
    QueryHistory doubled;
    for (const HistoryRow& row : example.rows()) {
        doubled.append({row.query, row.noisy_answer, 2.0 * row.alpha,
                        row.sensitivity});
    }
    const double base = estimate_variance(example, test::example_target());
    CHECK(estimate_variance(doubled, test::example_target()) ==
          doctest::Approx(base / 4.0).epsilon(1e-12));
}

TEST_CASE("variance matches resampled estimates") {
    const CountCube cube = test::example_cube();
    const auto queries = test::example_queries();
    const auto alphas = test::example_alphas();
    const LinearQuery target = test::example_target();
    const double truth = true_answer(cube, target);

    const QueryHistory base = test::example_history();
    const EstimatorWeights weights = estimator_matrix(base, target);
    const double variance = estimate_variance(base, target);

    const int trials = 100000;
    double sum = 0.0, sum_sq = 0.0;
    NoiseSource source(2024);
    for (int t = 0; t < trials; ++t) {
        double estimate = 0.0;
        for (std::size_t k = 0; k < queries.size(); ++k) {
            const double answer =
                true_answer(cube, queries[k]) +
                sample_laplace(alphas[k], base.row(k).sensitivity, source);
            estimate += weights.weights[k] * answer;
        }
        sum += estimate;
        sum_sq += estimate * estimate;
    }
    const double mean = sum / trials;
    const double empirical = sum_sq / trials - mean * mean;
    CHECK(empirical == doctest::Approx(variance).epsilon(0.02));

    // unbiasedness: the mean over the first 10^4 trials sits within 4
    // standard errors of the truth
    const double se = std::sqrt(variance / trials);
    CHECK(std::abs(mean - truth) < 4 * se);
}

TEST_CASE("unbiasedness identity A H = Q") {
    const QueryHistory history = test::example_history();
    const LinearQuery target = test::example_target();
    const EstimatorWeights weights = estimator_matrix(history, target);
    for (std::size_t j = 0; j < history.dimension(); ++j) {
        double dot = 0.0;
        for (std::size_t k = 0; k < history.row_count(); ++k) {
            dot += weights.weights[k] * history.row(k).query.coefficient(j);
        }
        CHECK(std::abs(dot - target.coefficient(j)) < 1e-9);
    }
}

TEST_CASE("any unbiased perturbation has no smaller variance") {
    const QueryHistory history = test::example_history();
    const LinearQuery target = test::example_target();
    const EstimatorWeights weights = estimator_matrix(history, target);

    auto weighted_variance = [&](const std::vector<double>& a) {
        double total = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            const HistoryRow& row = history.row(k);
            const double scale = row.sensitivity / row.alpha;
            total += 2.0 * a[k] * a[k] * scale * scale;
        }
        return total;
    };

    // d spans the left null space of H: d = r - H (H^T H)^-1 H^T r done
    // numerically via two orthogonalization passes against H's columns.
    NoiseSource source(17);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> d(history.row_count());
        for (double& v : d) v = source.next_uniform() - 0.5;
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t j = 0; j < history.dimension(); ++j) {
                double num = 0.0, den = 0.0;
                for (std::size_t k = 0; k < d.size(); ++k) {
                    const double h = history.row(k).query.coefficient(j);
                    num += d[k] * h;
                    den += h * h;
                }
                for (std::size_t k = 0; k < d.size(); ++k) {
                    d[k] -= num / den * history.row(k).query.coefficient(j);
                }
            }
        }
        // re-orthogonalization against a non-orthogonal basis is inexact;
        // verify d . H ~ 0 before using it
        for (std::size_t j = 0; j < history.dimension(); ++j) {
            double dot = 0.0;
            for (std::size_t k = 0; k < d.size(); ++k) {
                dot += d[k] * history.row(k).query.coefficient(j);
            }
            if (std::abs(dot) > 1e-8) return;  // skip a bad draw
        }
        const double t = (source.next_uniform() - 0.5) * 4.0;
        if (t == 0.0) continue;
        std::vector<double> perturbed = weights.weights;
        for (std::size_t k = 0; k < perturbed.size(); ++k) {
            perturbed[k] += t * d[k];
        }
        CHECK(weighted_variance(perturbed) >=
              weighted_variance(weights.weights) - 1e-9);
    }
}

TEST_CASE("the two estimate paths agree") {
    const QueryHistory history = test::example_history();
    const LinearQuery target = test::example_target();
    const EstimatorWeights weights = estimator_matrix(history, target);
    const double via_weights = blue_point_estimate(weights, history);
    const std::vector<double> cells = estimate_cells(history);
    double via_cells = 0.0;
    for (std::size_t j = 0; j < cells.size(); ++j) {
        via_cells += target.coefficient(j) * cells[j];
    }
    CHECK(std::abs(via_weights - via_cells) <=
          1e-6 * (1.0 + std::abs(via_weights)));
}

TEST_CASE("rescaling all row weights leaves A unchanged") {
    // scaling every alpha by c scales all weights (alpha/S)^2 by c^2, and
    // the projection is invariant to that
    const QueryHistory example = test::example_history();
    QueryHistory scaled;
    for (const HistoryRow& row : example.rows()) {
        scaled.append({row.query, row.noisy_answer, 13.7 * row.alpha,
                       row.sensitivity});
    }
    const EstimatorWeights original =
        estimator_matrix(example, test::example_target());
    const EstimatorWeights rescaled =
        estimator_matrix(scaled, test::example_target());
    for (std::size_t k = 0; k < original.weights.size(); ++k) {
        CHECK(rescaled.weights[k] ==
              doctest::Approx(original.weights[k]).epsilon(1e-12));
    }
}

TEST_CASE("rank-deficient histories are rejected") {
    QueryHistory rank_deficient;
    rank_deficient.append({LinearQuery({1, 1, 0}), 1.0, 0.5, 1.0});
    rank_deficient.append({LinearQuery({0, 0, 1}), 2.0, 0.5, 1.0});
    rank_deficient.append({LinearQuery({2, 2, 0}), 3.0, 0.5, 2.0});
    CHECK_THROWS_AS(estimator_matrix(rank_deficient, LinearQuery({1, 0, 0})),
                    EstimabilityError);
    CHECK_THROWS_AS(estimate_variance(rank_deficient, LinearQuery({1, 0, 0})),
                    EstimabilityError);

    CHECK_THROWS_AS(
        estimator_matrix(test::example_history(), LinearQuery({1, 0})),
        ShapeError);
}

TEST_CASE("chebyshev delta") {
    CHECK(chebyshev_delta(1.0, 2.0) == 0.25);
    CHECK(chebyshev_delta(100.0, 10.0) == 1.0);
    CHECK(chebyshev_delta(400.0, 10.0) == 1.0);
    CHECK_THROWS_AS(chebyshev_delta(1.0, 0.0), ContractError);
}

TEST_CASE("chebyshev coverage holds empirically") {
    const QueryHistory base = test::example_history();
    const LinearQuery target = test::example_target();
    const EstimatorWeights weights = estimator_matrix(base, target);
    const double variance = estimate_variance(base, target);
    const double epsilon = 1.5 * std::sqrt(variance);
    const double bound = chebyshev_delta(variance, epsilon);

    const int trials = 10000;
    int inside = 0;
    NoiseSource source(31);
    for (int t = 0; t < trials; ++t) {
        double noise = 0.0;
        for (std::size_t k = 0; k < base.row_count(); ++k) {
            noise += weights.weights[k] *
                     sample_laplace(base.row(k).alpha,
                                    base.row(k).sensitivity, source);
        }
        if (std::abs(noise) <= epsilon) ++inside;
    }
    CHECK(static_cast<double>(inside) / trials >= 1.0 - bound - 0.01);
}
