// dpq: differentially private query answering with history inference.
//
// Verbs:
//   answer      one Laplace-mechanism answer to a query
//   estimate    best linear unbiased estimate of a query from a history
//   infer       posterior mass vector for a query (--method mc|pc)
//   interval    credible interval from the posterior
//   cost        per-cell privacy spending of a history
//   allocate    minimum budget meeting an (epsilon, delta) requirement
//   serve-batch utility-driven engine over a request file
//   bench       synthetic workload experiment

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dpinfer/bench.hpp"
#include "dpinfer/engine.hpp"
#include "dpinfer/estimator.hpp"
#include "dpinfer/interval.hpp"
#include "dpinfer/io.hpp"
#include "dpinfer/ledger.hpp"

namespace {

using namespace dpinfer;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct GlobalOptions {
    std::uint64_t seed = 0;
    std::string cube_path;
    std::string history_path;
    std::string query_path;
    double gamma = 0.01;
    std::size_t samples = 100000;
    std::optional<double> epsilon;
    std::optional<double> delta;
    std::optional<double> alpha;
    std::optional<double> sensitivity;
    std::optional<double> bound;
    std::string method = "pc";
    std::string out_path;
    std::string requests_path;
    std::string config_path;
    std::string history_out_path;
    std::optional<double> interval_delta;
};

UtilityRequirement requirement_from(const GlobalOptions& opt,
                                    const QuerySpec& spec) {
    if (opt.epsilon && opt.delta) {
        return UtilityRequirement(*opt.epsilon, *opt.delta);
    }
    if (spec.requirement) {
        return *spec.requirement;
    }
    throw ContractError(
        "no utility requirement: pass --epsilon/--delta or put them in the "
        "query file");
}

InferenceConfig inference_config(const GlobalOptions& opt) {
    InferenceConfig config;
    config.method = opt.method == "mc" ? PosteriorMethod::monte_carlo
                                       : PosteriorMethod::probability_calculation;
    config.gamma = opt.gamma;
    config.sample_size = opt.samples;
    return config;
}

std::ostream& output(const GlobalOptions& opt, std::ofstream& file) {
    if (opt.out_path.empty()) return std::cout;
    file.open(opt.out_path);
    if (!file) throw ParseError("cannot write " + opt.out_path);
    return file;
}

int cmd_answer(const GlobalOptions& opt) {
    const CountCube cube = load_cube_file(opt.cube_path);
    const QuerySpec spec = load_query_file(opt.query_path);
    double alpha;
    if (opt.alpha) {
        alpha = *opt.alpha;
    } else {
        const UtilityRequirement req = requirement_from(opt, spec);
        alpha = allocate_budget(sensitivity_of(spec.query), req.epsilon,
                                req.delta);
    }
    NoiseSource source(opt.seed);
    const double answer = answer_query(cube, spec.query, alpha, source);
    std::ofstream file;
    std::ostream& out = output(opt, file);
    out << format_double(answer) << '\n';
    return kExitOk;
}

int cmd_estimate(const GlobalOptions& opt) {
    const QueryHistory history = load_history_file(opt.history_path);
    const QuerySpec spec = load_query_file(opt.query_path);
    const EstimatorWeights weights = estimator_matrix(history, spec.query);
    const double estimate = blue_point_estimate(weights, history);
    const double variance = estimate_variance(history, spec.query);
    std::ofstream file;
    std::ostream& out = output(opt, file);
    out << "estimate," << format_double(estimate) << '\n';
    out << "variance," << format_double(variance) << '\n';
    return kExitOk;
}

Posterior make_posterior(const GlobalOptions& opt, const QueryHistory& history,
                         const QuerySpec& spec) {
    const EstimatorWeights weights = estimator_matrix(history, spec.query);
    return posterior_of(weights, history, inference_config(opt),
                        NoiseSource(opt.seed));
}

int cmd_infer(const GlobalOptions& opt) {
    const QueryHistory history = load_history_file(opt.history_path);
    const QuerySpec spec = load_query_file(opt.query_path);
    const Posterior posterior = make_posterior(opt, history, spec);
    if (opt.out_path.empty()) {
        throw ContractError("infer needs --out for the mass vector CSV");
    }
    save_posterior(opt.out_path, posterior, inference_config(opt));
    return kExitOk;
}

int cmd_interval(const GlobalOptions& opt) {
    const QueryHistory history = load_history_file(opt.history_path);
    const QuerySpec spec = load_query_file(opt.query_path);
    double delta;
    if (opt.interval_delta) {
        delta = *opt.interval_delta;
    } else if (opt.delta) {
        delta = *opt.delta;
    } else if (spec.requirement) {
        delta = spec.requirement->delta;
    } else {
        throw ContractError("interval needs --delta");
    }
    const Posterior posterior = make_posterior(opt, history, spec);
    const auto [lower, upper] = credible_interval(posterior, delta);
    std::ofstream file;
    std::ostream& out = output(opt, file);
    out << "L," << format_double(lower) << '\n';
    out << "U," << format_double(upper) << '\n';
    out << "confidence," << format_double(confidence_of(posterior, lower, upper))
        << '\n';
    return kExitOk;
}

int cmd_cost(const GlobalOptions& opt) {
    const QueryHistory history = load_history_file(opt.history_path);
    const SystemCost cost = system_cost(history);
    std::ofstream file;
    std::ostream& out = output(opt, file);
    for (std::size_t j = 0; j < cost.per_cell.size(); ++j) {
        out << (j ? "," : "") << format_double(cost.per_cell[j]);
    }
    out << '\n' << format_double(cost.alpha_bar) << '\n';
    return kExitOk;
}

int cmd_allocate(const GlobalOptions& opt) {
    if (!opt.epsilon || !opt.delta) {
        throw ContractError("allocate needs --epsilon and --delta");
    }
    double sensitivity = 1.0;
    if (opt.sensitivity) {
        sensitivity = *opt.sensitivity;
    } else if (!opt.query_path.empty()) {
        sensitivity = sensitivity_of(load_query_file(opt.query_path).query);
    }
    std::ofstream file;
    std::ostream& out = output(opt, file);
    out << format_double(allocate_budget(sensitivity, *opt.epsilon, *opt.delta))
        << '\n';
    return kExitOk;
}

int cmd_serve_batch(const GlobalOptions& opt) {
    const CountCube cube = load_cube_file(opt.cube_path);

    std::ifstream in(opt.requests_path);
    if (!in) throw ParseError("cannot open " + opt.requests_path);
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(opt.requests_path + ": " + e.what());
    }
    if (!parsed.is_array()) {
        throw ParseError(opt.requests_path + ": expected a JSON array");
    }
    std::vector<Engine::Request> requests;
    for (const auto& item : parsed) {
        std::vector<double> coefficients =
            item.at("coefficients").get<std::vector<double>>();
        requests.push_back({LinearQuery(std::move(coefficients)),
                            UtilityRequirement(item.at("epsilon").get<double>(),
                                               item.at("delta").get<double>())});
    }

    EngineConfig config;
    config.inference = inference_config(opt);
    QueryHistory initial;
    if (!opt.history_path.empty()) {
        initial = load_history_file(opt.history_path);
    }
    Engine engine(cube, opt.bound.value_or(std::numeric_limits<double>::infinity()),
                  config, NoiseSource(opt.seed), std::move(initial));

    std::vector<RunRecord> log;
    for (std::size_t i = 0; i < requests.size(); ++i) {
        const QueryResponse r =
            engine.answer(requests[i].query, requests[i].requirement);
        log.push_back({i, r.served_from, r.alpha_spent, r.estimate, r.lower,
                       r.upper, requests[i].requirement.epsilon,
                       requests[i].requirement.delta,
                       std::numeric_limits<double>::quiet_NaN()});
    }
    std::ofstream file;
    std::ostream& out = output(opt, file);
    save_run_log(out, log);
    if (!opt.history_out_path.empty()) {
        save_history_file(opt.history_out_path, engine.history());
    }
    return kExitOk;
}

int cmd_bench(const GlobalOptions& opt) {
    ExperimentConfig config = load_experiment_config_file(opt.config_path);
    if (!opt.out_path.empty()) config.out_dir = opt.out_path;
    const ExperimentResult result = run_experiment(config);
    std::cout << "mode,answering_ratio,reliability_ratio,relative_error\n"
              << "inference," << format_double(result.inference.answering_ratio)
              << ',' << format_double(result.inference.reliability_ratio) << ','
              << format_double(result.inference.relative_error) << '\n'
              << "baseline," << format_double(result.baseline.answering_ratio)
              << ',' << format_double(result.baseline.reliability_ratio) << ','
              << format_double(result.baseline.relative_error) << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"differentially private query answering with history inference"};
    app.require_subcommand(1);

    GlobalOptions opt;
    app.add_option("--seed", opt.seed, "master seed for all randomness");
    app.add_option("--cube", opt.cube_path, "cube file: one count per line");
    app.add_option("--history", opt.history_path, "history CSV");
    app.add_option("--query", opt.query_path, "query JSON");
    app.add_option("--gamma", opt.gamma, "PC truncation loss budget");
    app.add_option("--samples", opt.samples, "MC sample size");
    app.add_option("--epsilon", opt.epsilon, "interval half-length");
    app.add_option("--delta", opt.delta, "1 - confidence level");
    app.add_option("--alpha", opt.alpha, "explicit privacy budget");
    app.add_option("--sensitivity", opt.sensitivity, "query sensitivity");
    app.add_option("--bound", opt.bound, "overall privacy budget");
    app.add_option("--method", opt.method, "posterior method: mc or pc")
        ->check(CLI::IsMember({"mc", "pc"}));
    app.add_option("--out", opt.out_path, "output file (default stdout)");

    // global flags may follow the verb: let unmatched options fall through
    auto* answer = app.add_subcommand("answer", "one Laplace-mechanism answer");
    answer->fallthrough();
    auto* estimate =
        app.add_subcommand("estimate", "BLUE estimate from a history");
    estimate->fallthrough();
    auto* infer = app.add_subcommand("infer", "posterior mass vector");
    infer->fallthrough();
    auto* interval = app.add_subcommand("interval", "credible interval");
    interval->fallthrough();
    interval->add_option("--delta", opt.interval_delta,
                         "1 - confidence level for the interval");
    auto* cost = app.add_subcommand("cost", "per-cell privacy spending");
    cost->fallthrough();
    auto* allocate = app.add_subcommand("allocate", "budget for a requirement");
    allocate->fallthrough();
    auto* serve = app.add_subcommand("serve-batch", "engine over a request file");
    serve->fallthrough();
    serve->add_option("--requests", opt.requests_path,
                      "JSON array of {coefficients, epsilon, delta}")
        ->required();
    serve->add_option("--history-out", opt.history_out_path,
                      "write the final history CSV here for restart");
    auto* bench = app.add_subcommand("bench", "synthetic workload experiment");
    bench->fallthrough();
    bench->add_option("--config", opt.config_path, "experiment config JSON")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (answer->parsed()) return cmd_answer(opt);
        if (estimate->parsed()) return cmd_estimate(opt);
        if (infer->parsed()) return cmd_infer(opt);
        if (interval->parsed()) return cmd_interval(opt);
        if (cost->parsed()) return cmd_cost(opt);
        if (allocate->parsed()) return cmd_allocate(opt);
        if (serve->parsed()) return cmd_serve_batch(opt);
        if (bench->parsed()) return cmd_bench(opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
