#ifndef DPINFER_BENCH_HPP_
#define DPINFER_BENCH_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dpinfer/engine.hpp"

namespace dpinfer {

// Skewed cell-popularity distribution: cells come in decades, each decade
// ten times less likely than the previous, normalized to sum 1.
std::vector<double> cell_distribution(std::size_t n);

// Synthetic workload: each query's coefficients are multinomial counts over
// cell_distribution(n) with a trial count drawn uniformly from 1..10.
std::vector<LinearQuery> generate_queries(std::size_t n, std::size_t count,
                                          const NoiseSource& source);

// Bootstrap history: a balanced binary partition tree over the cells. Every
// level is a full partition answered with 0/1 indicator rows at budget
// total_alpha / depth, so each cell's accumulated cost is exactly
// total_alpha and the leaf level (all singletons) makes the design full
// rank.
QueryHistory build_hier_history(const CountCube& cube, double total_alpha,
                                const NoiseSource& source);

// One per-query line of an experiment run.
struct RunRecord {
    std::size_t qid;
    ServedFrom served_from;
    double alpha_spent;
    double estimate;
    double lower;
    double upper;
    double epsilon;
    double delta;
    double true_theta;
};

struct Metrics {
    double answering_ratio;    // answered / total
    double reliability_ratio;  // answered whose interval contains the truth
    double relative_error;     // mean |estimate - truth| / (2 epsilon)
};

// Metrics over a run log; truths[i] is the exact answer of query i.
Metrics compute_metrics(const std::vector<RunRecord>& log,
                        const std::vector<double>& truths);

struct ExperimentConfig {
    std::size_t n = 20;
    std::size_t queries = 1000;
    std::uint64_t seed = 1;
    std::optional<double> bound;               // absent = unbounded
    std::pair<double, double> epsilon_range =  // range of 2*epsilon
        {1.0, 1000.0};
    double delta = 0.2;
    PosteriorMethod method = PosteriorMethod::probability_calculation;
    double gamma = 0.01;
    std::optional<double> bootstrap_alpha;  // hierarchical history budget
    bool ols = false;
    std::string out_dir;  // empty = no CSV artifacts
};

struct ExperimentResult {
    std::vector<RunRecord> inference_log;
    std::vector<RunRecord> baseline_log;
    std::vector<double> truths;
    std::vector<double> abar_inference;  // system cost after each query
    std::vector<double> abar_baseline;
    Metrics inference;
    Metrics baseline;
};

// Runs the same seeded request stream through an inference engine and a
// baseline engine (fresh allocation only), computes both metric sets, and
// writes the run logs, metrics and cost trajectories as CSV when out_dir is
// set.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace dpinfer

#endif  // DPINFER_BENCH_HPP_
