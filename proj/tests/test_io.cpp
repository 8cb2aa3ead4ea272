#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "dpinfer/io.hpp"
#include "dpinfer/noise.hpp"
#include "test_support.hpp"

using namespace dpinfer;

TEST_CASE("doubles round-trip through their shortest form") {
    NoiseSource source(1);
    for (int i = 0; i < 2000; ++i) {
        double value = (source.next_uniform() - 0.5) *
                       std::pow(10.0, std::floor(source.next_uniform() * 20) - 10);
        CHECK(parse_double(format_double(value), "test") == value);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK_THROWS_AS(parse_double("12x", "test"), ParseError);
}

TEST_CASE("query json") {
    std::istringstream full(
        R"({"coefficients": [1, 0, 1, 0], "epsilon": 10, "delta": 0.2})");
    const QuerySpec spec = load_query(full);
    CHECK(spec.query.coefficients() == std::vector<double>{1, 0, 1, 0});
    REQUIRE(spec.requirement.has_value());
    CHECK(spec.requirement->epsilon == 10.0);
    CHECK(spec.requirement->delta == 0.2);

    std::istringstream bare(R"({"coefficients": [2, 2, 0, 0]})");
    CHECK_FALSE(load_query(bare).requirement.has_value());

    std::istringstream with_constant(
        R"({"coefficients": [2, 2, 0, 0], "constant": -10})");
    CHECK_THROWS_WITH_AS(load_query(with_constant),
                         doctest::Contains("constant"), ParseError);

    std::istringstream lonely_epsilon(
        R"({"coefficients": [1], "epsilon": 5})");
    CHECK_THROWS_AS(load_query(lonely_epsilon), ParseError);

    std::istringstream empty(R"({"coefficients": []})");
    CHECK_THROWS_AS(load_query(empty), ParseError);

    std::istringstream junk("not json");
    CHECK_THROWS_AS(load_query(junk), ParseError);
}

TEST_CASE("history csv round-trips bit for bit") {
    const CountCube cube = test::example_cube();
    const QueryHistory history =
        answer_history(cube, test::example_queries(), test::example_alphas(),
                       NoiseSource(123));

    std::ostringstream out;
    save_history(out, history);
    std::istringstream in(out.str());
    const QueryHistory parsed = load_history(in);

    REQUIRE(parsed.row_count() == history.row_count());
    for (std::size_t i = 0; i < history.row_count(); ++i) {
        CHECK(parsed.row(i).alpha == history.row(i).alpha);
        CHECK(parsed.row(i).sensitivity == history.row(i).sensitivity);
        CHECK(parsed.row(i).noisy_answer == history.row(i).noisy_answer);
        CHECK(parsed.row(i).query.coefficients() ==
              history.row(i).query.coefficients());
    }

    // a second emit is byte-identical
    std::ostringstream again;
    save_history(again, parsed);
    CHECK(again.str() == out.str());
}

TEST_CASE("history csv rejects malformed input") {
    std::istringstream bad_header("a,b,c\n");
    CHECK_THROWS_AS(load_history(bad_header), ParseError);

    std::istringstream bad_field("alpha,sensitivity,y,q_0\n0.5,1,x,1\n");
    CHECK_THROWS_WITH_AS(load_history(bad_field), doctest::Contains("line 2"),
                         ParseError);

    std::istringstream wrong_sensitivity(
        "alpha,sensitivity,y,q_0\n0.5,3,1.5,1\n");
    CHECK_THROWS_AS(load_history(wrong_sensitivity), ParseError);

    std::istringstream missing_field("alpha,sensitivity,y,q_0\n0.5,1,1.5\n");
    CHECK_THROWS_AS(load_history(missing_field), ParseError);
}

TEST_CASE("mass vector csv round-trips") {
    const ProbabilityMassVector pmv = laplace_pmv(0.3, 1.0, 0.9, 21);
    std::ostringstream out;
    save_pmv(out, pmv);
    std::istringstream in(out.str());
    const ProbabilityMassVector parsed = load_pmv(in);
    CHECK(parsed.masses() == pmv.masses());

    std::istringstream asymmetric("offset,mass\n0,0.5\n1,0.5\n");
    CHECK_THROWS_AS(load_pmv(asymmetric), ParseError);

    std::istringstream gap("offset,mass\n-1,0.2\n1,0.2\n");
    CHECK_THROWS_AS(load_pmv(gap), ParseError);
}

TEST_CASE("experiment config json") {
    std::istringstream in(R"({
        "n": 50, "queries": 200, "seed": 7, "bound": 1.0,
        "epsilon_range": [1, 1000], "delta": 0.2,
        "method": "pc", "gamma": 0.01, "bootstrap_alpha": 0.3
    })");
    const ExperimentConfig config = load_experiment_config(in);
    CHECK(config.n == 50);
    CHECK(config.queries == 200);
    CHECK(config.seed == 7);
    CHECK(config.bound == 1.0);
    CHECK(config.epsilon_range.first == 1.0);
    CHECK(config.epsilon_range.second == 1000.0);
    CHECK(config.method == PosteriorMethod::probability_calculation);
    CHECK(config.bootstrap_alpha == 0.3);

    std::istringstream unknown(R"({"n": 5, "typo": 1})");
    CHECK_THROWS_WITH_AS(load_experiment_config(unknown),
                         doctest::Contains("typo"), ParseError);

    std::istringstream bad_method(R"({"method": "exact"})");
    CHECK_THROWS_AS(load_experiment_config(bad_method), ParseError);
}

TEST_CASE("run log format") {
    std::vector<RunRecord> log;
    log.push_back({0, ServedFrom::fresh_mechanism, 0.25, 10.5, 9.5, 11.5, 1.0,
                   0.2, 10.0});
    log.push_back({1, ServedFrom::history_inference, 0.0, 3.0, 1.0, 5.0, 2.0,
                   0.2, 3.5});
    std::ostringstream out;
    save_run_log(out, log);
    const std::string text = out.str();
    CHECK(text.find("qid,served_from,alpha_spent,estimate,L,U,epsilon,delta,"
                    "true_theta\n") == 0);
    CHECK(text.find("0,fresh_mechanism,0.25,10.5,9.5,11.5,1,0.2,10\n") !=
          std::string::npos);
    CHECK(text.find("1,history_inference,0,3,1,5,2,0.2,3.5\n") !=
          std::string::npos);
}
