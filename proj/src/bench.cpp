#include "dpinfer/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "dpinfer/io.hpp"

namespace dpinfer {

std::vector<double> cell_distribution(std::size_t n) {
    if (n == 0) {
        throw ContractError("cell count must be positive");
    }
    std::vector<double> weights(n);
    double total = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
        const double decade = std::floor(static_cast<double>(j - 1) / 10.0);
        weights[j - 1] = 0.9 * std::pow(10.0, -decade);
        total += weights[j - 1];
    }
    // The raw decade weights sum to about n/10 + 10/9; only the normalized
    // form is a distribution the multinomial sampler can use.
    for (double& w : weights) w /= total;
    return weights;
}

namespace {

// Streams within the workload generator's master seed.
constexpr std::uint64_t kTrialCountStream = 0;
constexpr std::uint64_t kCellDrawStream = 1;

std::size_t draw_from_cdf(const std::vector<double>& cdf, double u) {
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    return std::min(static_cast<std::size_t>(it - cdf.begin()),
                    cdf.size() - 1);
}

}  // namespace

std::vector<LinearQuery> generate_queries(std::size_t n, std::size_t count,
                                          const NoiseSource& source) {
    if (count == 0) {
        throw ContractError("query count must be positive");
    }
    const std::vector<double> probs = cell_distribution(n);
    std::vector<double> cdf(probs.size());
    double running = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
        running += probs[j];
        cdf[j] = running;
    }

    NoiseSource trials = source.stream(kTrialCountStream);
    NoiseSource cells = source.stream(kCellDrawStream);
    std::vector<LinearQuery> queries;
    queries.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        // trial count uniform on 1..10; next_uniform() < 1 keeps it in range
        const auto n_t =
            1 + static_cast<std::size_t>(trials.next_uniform() * 10.0);
        std::vector<double> coefficients(n, 0.0);
        for (std::size_t t = 0; t < n_t; ++t) {
            coefficients[draw_from_cdf(cdf, cells.next_uniform())] += 1.0;
        }
        queries.emplace_back(std::move(coefficients));
    }
    return queries;
}

QueryHistory build_hier_history(const CountCube& cube, double total_alpha,
                                const NoiseSource& source) {
    if (!(total_alpha > 0.0)) {
        throw ContractError("bootstrap budget must be positive");
    }
    const std::size_t n = cube.size();

    // Levels of a balanced binary partition tree. Every level partitions all
    // cells (singletons carry through), and the last level is all singletons.
    using Range = std::pair<std::size_t, std::size_t>;
    std::vector<std::vector<Range>> levels{{{0, n}}};
    while (std::any_of(levels.back().begin(), levels.back().end(),
                       [](const Range& r) { return r.second - r.first > 1; })) {
        std::vector<Range> next;
        for (const Range& r : levels.back()) {
            if (r.second - r.first <= 1) {
                next.push_back(r);
            } else {
                const std::size_t mid = (r.first + r.second) / 2;
                next.push_back({r.first, mid});
                next.push_back({mid, r.second});
            }
        }
        levels.push_back(std::move(next));
    }

    // Sequential composition across levels, parallel within a level: each
    // cell is covered once per level, so its cost is exactly total_alpha.
    const double level_alpha = total_alpha / static_cast<double>(levels.size());
    std::vector<LinearQuery> queries;
    std::vector<double> alphas;
    for (const auto& level : levels) {
        for (const Range& r : level) {
            std::vector<double> coefficients(n, 0.0);
            for (std::size_t j = r.first; j < r.second; ++j) {
                coefficients[j] = 1.0;
            }
            queries.emplace_back(std::move(coefficients));
            alphas.push_back(level_alpha);
        }
    }
    return answer_history(cube, queries, alphas, source);
}

Metrics compute_metrics(const std::vector<RunRecord>& log,
                        const std::vector<double>& truths) {
    if (log.size() != truths.size()) {
        throw ShapeError("run log and truth vector are not aligned");
    }
    std::size_t answered = 0;
    std::size_t covered = 0;
    double error_sum = 0.0;
    for (std::size_t i = 0; i < log.size(); ++i) {
        const RunRecord& r = log[i];
        if (r.served_from == ServedFrom::rejected) continue;
        ++answered;
        if (r.lower <= truths[i] && truths[i] <= r.upper) ++covered;
        error_sum += std::abs(r.estimate - truths[i]) / (2.0 * r.epsilon);
    }
    Metrics metrics{};
    metrics.answering_ratio =
        log.empty() ? 0.0
                    : static_cast<double>(answered) /
                          static_cast<double>(log.size());
    metrics.reliability_ratio =
        answered == 0 ? 0.0
                      : static_cast<double>(covered) /
                            static_cast<double>(answered);
    metrics.relative_error =
        answered == 0 ? 0.0 : error_sum / static_cast<double>(answered);
    return metrics;
}

namespace {

// Streams within the experiment's master seed. The engine and the bootstrap
// history get scrambled masters of their own, so no generator stream is
// shared between the workload, the bootstrap noise and the engine's fresh
// answers.
constexpr std::uint64_t kCubeStream = 100;
constexpr std::uint64_t kEpsilonStream = 101;

std::uint64_t scramble(std::uint64_t seed) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

CountCube synthetic_cube(std::size_t n, const NoiseSource& source) {
    NoiseSource s = source.stream(kCubeStream);
    std::vector<std::int64_t> counts(n);
    for (auto& c : counts) {
        c = static_cast<std::int64_t>(s.next_uniform() * 1001.0);
    }
    return CountCube(std::move(counts));
}

struct Workload {
    std::vector<Engine::Request> requests;
    std::vector<double> truths;
};

Workload make_workload(const ExperimentConfig& config, const CountCube& cube,
                       const NoiseSource& source) {
    const std::vector<LinearQuery> queries =
        generate_queries(config.n, config.queries, source);
    NoiseSource widths = source.stream(kEpsilonStream);
    Workload workload;
    workload.requests.reserve(queries.size());
    for (const LinearQuery& q : queries) {
        const double two_eps =
            config.epsilon_range.first +
            widths.next_uniform() *
                (config.epsilon_range.second - config.epsilon_range.first);
        workload.requests.push_back(
            {q, UtilityRequirement(two_eps / 2.0, config.delta)});
        workload.truths.push_back(true_answer(cube, q));
    }
    return workload;
}

std::vector<RunRecord> run_one_mode(const ExperimentConfig& config,
                                    const CountCube& cube,
                                    const Workload& workload,
                                    bool use_inference,
                                    std::vector<double>& abar_trace) {
    EngineConfig engine_config;
    engine_config.inference.method = config.method;
    engine_config.inference.gamma = config.gamma;
    engine_config.use_inference = use_inference;
    engine_config.ols_weights = config.ols;

    const double bound =
        config.bound.value_or(std::numeric_limits<double>::infinity());
    NoiseSource engine_source(scramble(config.seed));
    QueryHistory bootstrap;
    if (config.bootstrap_alpha) {
        bootstrap = build_hier_history(cube, *config.bootstrap_alpha,
                                       NoiseSource(scramble(config.seed ^ 1)));
    }
    Engine engine(cube, bound, engine_config, engine_source,
                  std::move(bootstrap));

    std::vector<RunRecord> log;
    log.reserve(workload.requests.size());
    abar_trace.clear();
    for (std::size_t i = 0; i < workload.requests.size(); ++i) {
        const Engine::Request& request = workload.requests[i];
        const QueryResponse response =
            engine.answer(request.query, request.requirement);
        log.push_back({i, response.served_from, response.alpha_spent,
                       response.estimate, response.lower, response.upper,
                       request.requirement.epsilon, request.requirement.delta,
                       workload.truths[i]});
        abar_trace.push_back(engine.ledger().alpha_bar());
    }
    return log;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    const NoiseSource workload_source(config.seed, 1);
    const CountCube cube = synthetic_cube(config.n, workload_source);
    const Workload workload = make_workload(config, cube, workload_source);

    ExperimentResult result;
    result.truths = workload.truths;
    result.inference_log = run_one_mode(config, cube, workload,
                                        /*use_inference=*/true,
                                        result.abar_inference);
    result.baseline_log = run_one_mode(config, cube, workload,
                                       /*use_inference=*/false,
                                       result.abar_baseline);
    result.inference = compute_metrics(result.inference_log, result.truths);
    result.baseline = compute_metrics(result.baseline_log, result.truths);

    if (!config.out_dir.empty()) {
        save_run_log_file(config.out_dir + "/run_inference.csv",
                          result.inference_log);
        save_run_log_file(config.out_dir + "/run_baseline.csv",
                          result.baseline_log);
        std::ofstream metrics(config.out_dir + "/metrics.csv");
        if (!metrics) {
            throw ParseError("cannot write " + config.out_dir + "/metrics.csv");
        }
        metrics << "mode,answering_ratio,reliability_ratio,relative_error\n";
        metrics << "inference," << format_double(result.inference.answering_ratio)
                << ',' << format_double(result.inference.reliability_ratio)
                << ',' << format_double(result.inference.relative_error) << '\n';
        metrics << "baseline," << format_double(result.baseline.answering_ratio)
                << ',' << format_double(result.baseline.reliability_ratio)
                << ',' << format_double(result.baseline.relative_error) << '\n';
        std::ofstream trajectory(config.out_dir + "/alpha_bar.csv");
        if (!trajectory) {
            throw ParseError("cannot write " + config.out_dir + "/alpha_bar.csv");
        }
        trajectory << "qid,abar_inference,abar_baseline\n";
        for (std::size_t i = 0; i < result.abar_inference.size(); ++i) {
            trajectory << i << ',' << format_double(result.abar_inference[i])
                       << ',' << format_double(result.abar_baseline[i]) << '\n';
        }
    }
    return result;
}

}  // namespace dpinfer
