#include "dpinfer/estimator.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace dpinfer {

namespace {

constexpr double kRankThreshold = 1e-10;

struct WeightedDesign {
    Eigen::MatrixXd design;          // m x n history coefficient matrix H
    Eigen::VectorXd row_weights;     // (alpha_k / S_k)^2, or 1 for OLS
    Eigen::LDLT<Eigen::MatrixXd> gram;  // factorization of H^T W H
};

WeightedDesign factor_gram(const QueryHistory& history, bool unit_weights) {
    const auto m = static_cast<Eigen::Index>(history.row_count());
    const auto n = static_cast<Eigen::Index>(history.dimension());
    if (m == 0) {
        throw EstimabilityError("history is empty; nothing to estimate from");
    }

    WeightedDesign wd;
    wd.design.resize(m, n);
    wd.row_weights.resize(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const HistoryRow& row = history.row(static_cast<std::size_t>(k));
        for (Eigen::Index j = 0; j < n; ++j) {
            wd.design(k, j) = row.query.coefficient(static_cast<std::size_t>(j));
        }
        const double w = row.alpha / row.sensitivity;
        wd.row_weights(k) = unit_weights ? 1.0 : w * w;
    }

    // Normal equations on the weighted Gram matrix; the textbook inverse is
    // notation, not an algorithm.
    Eigen::MatrixXd gram =
        wd.design.transpose() * wd.row_weights.asDiagonal() * wd.design;
    wd.gram.compute(gram);

    const Eigen::VectorXd d = wd.gram.vectorD();
    const double largest = d.maxCoeff();
    if (!(largest > 0.0) || d.minCoeff() <= kRankThreshold * largest) {
        throw EstimabilityError(
            "history design has column rank below the cube dimension " +
            std::to_string(n) + "; the target is not estimable");
    }
    return wd;
}

Eigen::VectorXd target_vector(const QueryHistory& history,
                              const LinearQuery& target) {
    if (target.size() != history.dimension()) {
        throw ShapeError("target query has " + std::to_string(target.size()) +
                         " coefficients for a history of dimension " +
                         std::to_string(history.dimension()));
    }
    Eigen::VectorXd q(static_cast<Eigen::Index>(target.size()));
    for (Eigen::Index j = 0; j < q.size(); ++j) {
        q(j) = target.coefficient(static_cast<std::size_t>(j));
    }
    return q;
}

}  // namespace

EstimatorWeights estimator_matrix(const QueryHistory& history,
                                  const LinearQuery& target,
                                  bool unit_weights) {
    const WeightedDesign wd = factor_gram(history, unit_weights);
    const Eigen::VectorXd q = target_vector(history, target);

    // A^T = W H (H^T W H)^-1 Q^T
    const Eigen::VectorXd g = wd.gram.solve(q);
    const Eigen::VectorXd a = wd.row_weights.asDiagonal() * (wd.design * g);

    EstimatorWeights result{std::vector<double>(a.data(), a.data() + a.size()),
                            target};
    return result;
}

double blue_point_estimate(const EstimatorWeights& weights,
                           const QueryHistory& history) {
    if (weights.weights.size() != history.row_count()) {
        throw ShapeError("weight row length " +
                         std::to_string(weights.weights.size()) +
                         " does not match history row count " +
                         std::to_string(history.row_count()));
    }
    double estimate = 0.0;
    for (std::size_t k = 0; k < weights.weights.size(); ++k) {
        estimate += weights.weights[k] * history.row(k).noisy_answer;
    }
    return estimate;
}

std::vector<double> estimate_cells(const QueryHistory& history) {
    const WeightedDesign wd = factor_gram(history, /*unit_weights=*/false);
    Eigen::VectorXd answers(static_cast<Eigen::Index>(history.row_count()));
    for (Eigen::Index k = 0; k < answers.size(); ++k) {
        answers(k) = history.row(static_cast<std::size_t>(k)).noisy_answer;
    }
    const Eigen::VectorXd rhs =
        wd.design.transpose() * (wd.row_weights.asDiagonal() * answers);
    const Eigen::VectorXd cells = wd.gram.solve(rhs);
    return std::vector<double>(cells.data(), cells.data() + cells.size());
}

double estimate_variance(const QueryHistory& history,
                         const LinearQuery& target) {
    const WeightedDesign wd = factor_gram(history, /*unit_weights=*/false);
    const Eigen::VectorXd q = target_vector(history, target);
    return 2.0 * q.dot(wd.gram.solve(q));
}

double chebyshev_delta(double variance, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw ContractError("epsilon must be positive");
    }
    if (variance < 0.0) {
        throw ContractError("variance must be nonnegative");
    }
    return std::min(1.0, variance / (epsilon * epsilon));
}

}  // namespace dpinfer
