#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "dpinfer/ledger.hpp"
#include "dpinfer/noise.hpp"
#include "test_support.hpp"

using namespace dpinfer;

TEST_CASE("budget allocation") {
    CHECK(allocate_budget(1.0, 1.0, std::exp(-1.0)) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(allocate_budget(1.0, 500.0, 0.2) ==
          doctest::Approx(std::log(5.0) / 500.0).epsilon(1e-12));
    CHECK_THROWS_AS(allocate_budget(0.0, 1.0, 0.5), ContractError);
    CHECK_THROWS_AS(allocate_budget(1.0, 1.0, 1.5), ContractError);
}

TEST_CASE("allocation saturates the coverage identity") {
    NoiseSource params(2);
    for (int trial = 0; trial < 25; ++trial) {
        const double sensitivity = 0.5 + params.next_uniform() * 4.0;
        const double epsilon = 0.5 + params.next_uniform() * 400.0;
        const double delta = 0.02 + params.next_uniform() * 0.9;
        const double alpha = allocate_budget(sensitivity, epsilon, delta);
        CHECK(1.0 - std::exp(-epsilon * alpha / sensitivity) ==
              doctest::Approx(1.0 - delta).epsilon(1e-12));
    }
}

TEST_CASE("allocated budgets meet their coverage empirically") {
    NoiseSource params(3);
    for (int trial = 0; trial < 10; ++trial) {
        const double sensitivity = 0.5 + params.next_uniform() * 4.0;
        const double epsilon = 1.0 + params.next_uniform() * 300.0;
        const double delta = 0.05 + params.next_uniform() * 0.6;
        const double alpha = allocate_budget(sensitivity, epsilon, delta);

        NoiseSource source(1000 + trial);
        const int draws = 100000;
        int within = 0;
        for (int i = 0; i < draws; ++i) {
            if (std::abs(sample_laplace(alpha, sensitivity, source)) <= epsilon) {
                ++within;
            }
        }
        CHECK(static_cast<double>(within) / draws >= 1.0 - delta - 0.01);
    }
}

TEST_CASE("system cost of the running example") {
    const SystemCost cost = system_cost(test::example_history());
    REQUIRE(cost.per_cell.size() == 4);
    CHECK(cost.per_cell[0] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(cost.per_cell[1] == doctest::Approx(0.275).epsilon(1e-12));
    CHECK(cost.per_cell[2] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(cost.per_cell[3] == doctest::Approx(0.375).epsilon(1e-12));
    CHECK(cost.alpha_bar == doctest::Approx(0.375).epsilon(1e-12));
}

TEST_CASE("single row cost peaks at its budget") {
    QueryHistory history;
    const LinearQuery q({2, 1, 0, 0});
    history.append({q, 0.0, 0.4, sensitivity_of(q)});
    const SystemCost cost = system_cost(history);
    CHECK(cost.per_cell[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(cost.per_cell[1] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(cost.per_cell[2] == 0.0);
    CHECK(cost.alpha_bar == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("disjoint rows compose in parallel") {
    QueryHistory history;
    history.append({LinearQuery({1, 1, 0, 0}), 0.0, 0.4, 1.0});
    history.append({LinearQuery({0, 0, 1, 1}), 0.0, 0.4, 1.0});
    CHECK(system_cost(history).alpha_bar == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("appending a row matches the incremental update exactly") {
    QueryHistory history = test::example_history();
    const SystemCost before = system_cost(history);

    const LinearQuery candidate({0, 3, 0, 1});
    const double alpha = 0.21;
    const double rate = alpha / sensitivity_of(candidate);

    std::vector<double> incremental = before.per_cell;
    for (std::size_t j = 0; j < incremental.size(); ++j) {
        incremental[j] += rate * std::abs(candidate.coefficient(j));
    }

    history.append({candidate, 0.0, alpha, sensitivity_of(candidate)});
    const SystemCost after = system_cost(history);
    for (std::size_t j = 0; j < incremental.size(); ++j) {
        CHECK(after.per_cell[j] == incremental[j]);  // bitwise
        CHECK(after.per_cell[j] >= before.per_cell[j]);
    }
}

TEST_CASE("admission against the running example ledger") {
    const QueryHistory history = test::example_history();
    const SystemCost cost = system_cost(history);
    const LinearQuery candidate({0, 0, 0, 1});

    BudgetLedger roomy{cost.per_cell, 1.0};
    const AdmitDecision yes = admit(roomy, history, candidate, 0.5);
    CHECK(yes.admitted);
    CHECK(yes.excess == 0.0);

    BudgetLedger tight{cost.per_cell, 0.375};
    const AdmitDecision no = admit(tight, history, candidate, 0.5);
    CHECK_FALSE(no.admitted);
    CHECK(no.excess == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(admit(roomy, history, candidate, 0.0), ContractError);
}

TEST_CASE("unbounded ledgers admit anything") {
    const QueryHistory history = test::example_history();
    BudgetLedger ledger{system_cost(history).per_cell,
                        std::numeric_limits<double>::infinity()};
    CHECK(admit(ledger, history, LinearQuery({5, 5, 5, 5}), 1e9).admitted);
}
