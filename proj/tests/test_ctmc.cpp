/*
 * Copyright 2026 The psni authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ctmc.hpp"
#include "errors.hpp"
#include "parser.hpp"
#include "support/model_gen.hpp"

using namespace pepa;

namespace {

Rate fin(long num, long den = 1) { return Rate::finite(make_rational(num, den)); }

TermPtr st(const std::string& name) { return Term::constant(name); }

/// Hand-built graph: states are placeholder constants, arcs as given.
DerivationGraph make_graph(std::size_t n,
                           std::vector<Transition> transitions) {
    DerivationGraph g;
    for (std::size_t i = 0; i < n; ++i) g.states.push_back(st("S" + std::to_string(i)));
    std::sort(transitions.begin(), transitions.end(),
              [](const Transition& a, const Transition& b) {
                  if (a.source != b.source) return a.source < b.source;
                  if (a.action != b.action) return a.action < b.action;
                  return a.target < b.target;
              });
    g.transitions = std::move(transitions);
    g.rebuild_index();
    return g;
}

/// The hidden view of the three-state golden model with rates (lambda, rho):
/// 0 -tau-> 1, 0 -l-> 2, 1 -l-> 2, 2 -l-> 0.
DerivationGraph hidden_three_state(long lambda, long rho) {
    return make_graph(3, {{0, "tau", fin(lambda), 1, 1},
                          {0, "l", fin(lambda), 1, 2},
                          {1, "l", fin(lambda), 1, 2},
                          {2, "l", fin(rho), 1, 0}});
}

/// The restricted view: 0 -l-> 1 at lambda, 1 -l-> 0 at rho.
DerivationGraph restricted_two_state(long lambda, long rho) {
    return make_graph(2, {{0, "l", fin(lambda), 1, 1},
                          {1, "l", fin(rho), 1, 0}});
}

}  // namespace

TEST_CASE("generator assembly on the hidden three-state graph") {
    Generator q = build_generator(hidden_three_state(1, 2));
    REQUIRE(q.n == 3);
    REQUIRE(q.off_diag.size() == 4);
    // Entries sorted by (row, col): q01=1, q02=1, q12=1, q20=2.
    CHECK(q.off_diag[0].rate == make_rational(1));
    CHECK(q.off_diag[0].row == 0);
    CHECK(q.off_diag[0].col == 1);
    CHECK(q.off_diag[1].col == 2);
    CHECK(q.off_diag[2].row == 1);
    CHECK(q.off_diag[2].col == 2);
    CHECK(q.off_diag[3].row == 2);
    CHECK(q.off_diag[3].rate == make_rational(2));
    CHECK(q.diag[0] == make_rational(-2));
    CHECK(q.diag[1] == make_rational(-1));
    CHECK(q.diag[2] == make_rational(-2));
}

TEST_CASE("transition rates sum arcs regardless of action type") {
    // Two-state graph with parallel tau and h arcs: q(0,1) = 2 * lambda.
    DerivationGraph g = make_graph(2, {{0, "h", fin(1), 1, 1},
                                       {0, "tau", fin(1), 1, 1},
                                       {1, "l", fin(1), 1, 0}});
    Generator q = build_generator(g);
    REQUIRE(q.off_diag.size() == 2);
    CHECK(q.off_diag[0].rate == make_rational(2));
    CHECK(q.off_diag[1].rate == make_rational(1));
}

TEST_CASE("self-loops are excluded from the generator") {
    DerivationGraph g = make_graph(1, {{0, "a", fin(5), 1, 0}});
    Generator q = build_generator(g);
    CHECK(q.off_diag.empty());
    CHECK(q.diag[0] == make_rational(0));
    SteadyState s = steady_state(q);
    REQUIRE(s.probs.size() == 1);
    CHECK(s.probs[0] == doctest::Approx(1.0));
}

TEST_CASE("passive rates are rejected by CTMC construction") {
    DerivationGraph g = make_graph(2, {{0, "a", Rate::passive(make_rational(1)), 1, 1},
                                       {1, "b", fin(1), 1, 0}});
    CHECK_THROWS_AS(build_generator(g), PassiveRateReachableError);
    try {
        build_generator(g);
    } catch (const PassiveRateReachableError& e) {
        CHECK(e.state() == 0);
        CHECK(e.action() == "a");
    }
}

TEST_CASE("conditional and total conditional rates") {
    DerivationGraph fig1 = make_graph(2, {{0, "h", fin(1), 1, 1},
                                          {0, "tau", fin(1), 1, 1},
                                          {1, "l", fin(1), 1, 0}});
    RateTotal h = conditional_rate(fig1, 0, 1, "h");
    CHECK(h.finite == make_rational(1));
    CHECK(conditional_rate(fig1, 0, 1, "beta").is_zero());

    RateTotal tau = total_conditional_rate(fig1, 0, {1}, "tau");
    CHECK(tau.finite == make_rational(1));
    CHECK(total_conditional_rate(fig1, 0, {}, "tau").is_zero());

    DerivationGraph fig2 = make_graph(3, {{0, "h", fin(1), 1, 1},
                                          {0, "l", fin(1), 1, 2},
                                          {1, "l", fin(1), 1, 2},
                                          {2, "l", fin(2), 1, 0}});
    CHECK(conditional_rate(fig2, 0, 2, "l").finite == make_rational(1));
    // Only state 2 is an l-target of state 0.
    CHECK(total_conditional_rate(fig2, 0, {1, 2}, "l").finite == make_rational(1));

    // Self-loops count when the target set includes the source.
    DerivationGraph loop = make_graph(1, {{0, "a", fin(5), 1, 0}});
    CHECK(conditional_rate(loop, 0, 0, "a").finite == make_rational(5));
}

TEST_CASE("steady state of the hidden view matches the closed form") {
    for (auto [lambda, rho] : std::vector<std::pair<long, long>>{{1, 1}, {1, 2}, {3, 2}}) {
        CAPTURE(lambda);
        CAPTURE(rho);
        SteadyState s = steady_state(build_generator(hidden_three_state(lambda, rho)));
        double denom = static_cast<double>(lambda + rho);
        CHECK(s.probs[0] == doctest::Approx(rho / (2 * denom)).epsilon(1e-9));
        CHECK(s.probs[1] == doctest::Approx(rho / (2 * denom)).epsilon(1e-9));
        CHECK(s.probs[2] == doctest::Approx(lambda / denom).epsilon(1e-9));
        CHECK(s.residual <= 1e-10);
    }
}

TEST_CASE("steady state of the restricted view matches the closed form") {
    for (auto [lambda, rho] : std::vector<std::pair<long, long>>{{1, 1}, {1, 2}, {3, 2}}) {
        SteadyState s = steady_state(build_generator(restricted_two_state(lambda, rho)));
        double denom = static_cast<double>(lambda + rho);
        CHECK(s.probs[0] == doctest::Approx(rho / denom).epsilon(1e-9));
        CHECK(s.probs[1] == doctest::Approx(lambda / denom).epsilon(1e-9));
    }
}

TEST_CASE("two-state chain satisfies detailed balance") {
    DerivationGraph g = make_graph(2, {{0, "a", fin(3), 1, 1},
                                       {1, "b", fin(5), 1, 0}});
    SteadyState s = steady_state(build_generator(g));
    CHECK(s.probs[0] == doctest::Approx(5.0 / 8.0).epsilon(1e-12));
    CHECK(s.probs[1] == doctest::Approx(3.0 / 8.0).epsilon(1e-12));
}

TEST_CASE("reducible chains are rejected with their terminal components") {
    // 0 -> 1, but 1 never returns: bottom component {1}.
    DerivationGraph g = make_graph(2, {{0, "a", fin(1), 1, 1},
                                       {1, "b", fin(1), 1, 1}});
    Generator q = build_generator(g);
    CHECK_THROWS_AS(steady_state(q), NotIrreducibleError);
    try {
        steady_state(q);
    } catch (const NotIrreducibleError& e) {
        REQUIRE(e.bottom_components().size() == 1);
        CHECK(e.bottom_components()[0] == std::vector<std::uint32_t>{1});
        CHECK(std::string(e.what()).find("terminal") != std::string::npos);
    }

    // Two separate bottom components.
    DerivationGraph g2 = make_graph(3, {{0, "a", fin(1), 1, 1},
                                        {0, "a", fin(1), 1, 2}});
    try {
        steady_state(build_generator(g2));
        FAIL("expected NotIrreducibleError");
    } catch (const NotIrreducibleError& e) {
        CHECK(e.bottom_components().size() == 2);
    }
}

TEST_CASE("power iteration agrees with the dense solver") {
    SteadyOptions iterative;
    iterative.dense_threshold = 1;  // force the uniformized power path
    for (auto [lambda, rho] : std::vector<std::pair<long, long>>{{1, 2}, {3, 2}}) {
        Generator q = build_generator(hidden_three_state(lambda, rho));
        SteadyState dense = steady_state(q);
        SteadyState power = steady_state(q, iterative);
        REQUIRE(dense.probs.size() == power.probs.size());
        for (std::size_t i = 0; i < dense.probs.size(); ++i)
            CHECK(power.probs[i] == doctest::Approx(dense.probs[i]).epsilon(1e-9));
        CHECK(power.residual <= 1e-10);
    }
}

TEST_CASE("generator rows sum to zero exactly on random models") {
    std::mt19937_64 rng(90125);
    int solved = 0;
    for (int i = 0; i < 150; ++i) {
        ModelEnv env = testgen::random_model(rng);
        DerivationGraph g = derive_graph(env, env.system, 100000);
        Generator q = build_generator(g);
        std::vector<Rational> row_sum(q.n, Rational(0));
        for (const auto& e : q.off_diag) row_sum[e.row] += e.rate;
        for (std::size_t s = 0; s < q.n; ++s)
            CHECK(row_sum[s] + q.diag[s] == 0);

        try {
            SteadyState pi = steady_state(q);
            double total = 0.0;
            for (double p : pi.probs) {
                CHECK(p >= 0.0);
                total += p;
            }
            CHECK(std::fabs(total - 1.0) <= 1e-12);
            CHECK(pi.residual <= 1e-10);
            ++solved;
        } catch (const NotIrreducibleError&) {
            // Reducible random models are expected; nothing to check.
        }
    }
    CHECK(solved > 20);
}
