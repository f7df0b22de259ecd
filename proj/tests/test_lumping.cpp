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

#include "errors.hpp"
#include "lumping.hpp"
#include "parser.hpp"
#include "support/model_gen.hpp"
#include "support/partition_oracle.hpp"

using namespace pepa;

namespace {

Rate fin(long num, long den = 1) { return Rate::finite(make_rational(num, den)); }

DerivationGraph make_graph(std::size_t n, std::vector<Transition> transitions) {
    DerivationGraph g;
    for (std::size_t i = 0; i < n; ++i)
        g.states.push_back(Term::constant("S" + std::to_string(i)));
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

DerivationGraph hidden_three_state(long lambda, long rho) {
    return make_graph(3, {{0, "tau", fin(lambda), 1, 1},
                          {0, "l", fin(lambda), 1, 2},
                          {1, "l", fin(lambda), 1, 2},
                          {2, "l", fin(rho), 1, 0}});
}

DerivationGraph restricted_two_state(long lambda, long rho) {
    return make_graph(2, {{0, "l", fin(lambda), 1, 1},
                          {1, "l", fin(rho), 1, 0}});
}

/// Drops high-labelled arcs without pruning states (the per-state restricted
/// view used in lumping examples).
DerivationGraph drop_arcs(const DerivationGraph& g,
                          const std::set<std::string>& actions) {
    DerivationGraph out;
    out.states = g.states;
    for (const auto& t : g.transitions)
        if (!actions.count(t.action)) out.transitions.push_back(t);
    out.rebuild_index();
    return out;
}

ModelEnv parse_or_die(const std::string& source) {
    ParseResult r = parse_model(source);
    REQUIRE(r.ok());
    return *r.env;
}

const std::set<std::string> kTauOnly{"tau"};

bool matches_oracle(const DerivationGraph& g, const std::set<std::string>& ignored) {
    Partition p = coarsest_lumpable_partition(g, ignored);
    oracle::BlockOf expected = oracle::coarsest_stable(g, ignored);
    return oracle::same_partition(p.block_of, expected);
}

}  // namespace

TEST_CASE("fig2 with high arcs dropped lumps P1 with P2") {
    ModelEnv env = parse_or_die(
        "high = {h};\nP1 := (h, 1).P2 + (l, 1).P3;\nP2 := (l, 1).P3;\n"
        "P3 := (l, 2).P1;\nsystem P1;");
    DerivationGraph g = derive_graph(env, env.system, 100);
    DerivationGraph low = drop_arcs(g, {"h"});
    Partition p = coarsest_lumpable_partition(low, kTauOnly);
    CHECK(p.block_count() == 2);
    CHECK(p.same_block(0, 1));       // P1 and P2
    CHECK_FALSE(p.same_block(0, 2));
    CHECK(matches_oracle(low, kTauOnly));
}

TEST_CASE("fig1 with the high arc pruned separates the two states") {
    DerivationGraph low = make_graph(2, {{0, "tau", fin(1), 1, 1},
                                         {1, "l", fin(1), 1, 0}});
    Partition p = coarsest_lumpable_partition(low, kTauOnly);
    CHECK(p.block_count() == 2);
    CHECK_FALSE(p.same_block(0, 1));
    CHECK_FALSE(equivalent(low, 0, 1, kTauOnly));
    CHECK(matches_oracle(low, kTauOnly));
}

TEST_CASE("pairwise distinct rates split a chain into singletons") {
    DerivationGraph chain = make_graph(3, {{0, "l", fin(1), 1, 1},
                                           {1, "l", fin(2), 1, 2},
                                           {2, "l", fin(3), 1, 0}});
    Partition p = coarsest_lumpable_partition(chain, kTauOnly);
    CHECK(p.block_count() == 3);
}

TEST_CASE("equivalence is reflexive without any refinement work") {
    DerivationGraph g = hidden_three_state(1, 2);
    CHECK(equivalent(g, 1, 1, kTauOnly));
}

TEST_CASE("hidden three-state graph: roots of the tau and l halves lump") {
    // Oracle-verified: the coarsest stable partition over the 5 candidate
    // partitions of 3 states groups states 0 and 1 when lambda != rho, and
    // everything when lambda == rho.
    DerivationGraph g12 = hidden_three_state(1, 2);
    Partition p = coarsest_lumpable_partition(g12, kTauOnly);
    CHECK(equivalent(g12, 0, 1, kTauOnly));
    CHECK(p.block_count() == 2);
    CHECK(matches_oracle(g12, kTauOnly));

    DerivationGraph g11 = hidden_three_state(1, 1);
    Partition all = coarsest_lumpable_partition(g11, kTauOnly);
    CHECK(all.block_count() == 1);
    CHECK(matches_oracle(g11, kTauOnly));
}

TEST_CASE("union of hidden and restricted views: roots are equivalent") {
    for (auto [lambda, rho] : std::vector<std::pair<long, long>>{{1, 1}, {1, 2}, {3, 2}}) {
        CAPTURE(lambda);
        CAPTURE(rho);
        UnionGraph u = union_graph(hidden_three_state(lambda, rho),
                                   restricted_two_state(lambda, rho));
        CHECK(u.graph.state_count() == 5);
        CHECK(equivalent(u.graph, u.root1, u.root2, kTauOnly));
        CHECK(matches_oracle(u.graph, kTauOnly));
    }
}

TEST_CASE("union keeps structurally identical states apart") {
    DerivationGraph one = make_graph(1, {{0, "a", fin(1), 1, 0}});
    UnionGraph u = union_graph(one, one);
    CHECK(u.graph.state_count() == 2);
    CHECK(u.root1 == 0);
    CHECK(u.root2 == 1);
    // Identical dynamics: equivalent under any ignored set.
    CHECK(equivalent(u.graph, 0, 1, kTauOnly));
    CHECK(equivalent(u.graph, 0, 1, {"tau", "a"}));
}

TEST_CASE("the ignored set must contain tau") {
    DerivationGraph g = make_graph(1, {});
    CHECK_THROWS_AS(coarsest_lumpable_partition(g, {"h"}), IllFormedTermError);
}

TEST_CASE("passive rates are legal in signatures and never equal finite ones") {
    // Two self-loop states: one passive (a, T), one finite (a, 1).
    DerivationGraph g =
        make_graph(2, {{0, "a", Rate::passive(make_rational(1)), 1, 0},
                       {1, "a", fin(1), 1, 1}});
    Partition p = coarsest_lumpable_partition(g, kTauOnly);
    CHECK(p.block_count() == 2);

    // Equal passive weights do lump.
    DerivationGraph same =
        make_graph(2, {{0, "a", Rate::passive(make_rational(2)), 1, 0},
                       {1, "a", Rate::passive(make_rational(2)), 1, 1}});
    CHECK(coarsest_lumpable_partition(same, kTauOnly).block_count() == 1);

    // A state carrying both kinds differs from either pure one.
    DerivationGraph mixed =
        make_graph(2, {{0, "a", Rate::passive(make_rational(1)), 1, 0},
                       {0, "a", fin(1), 1, 0},
                       {1, "a", Rate::passive(make_rational(1)), 1, 1}});
    CHECK(coarsest_lumpable_partition(mixed, kTauOnly).block_count() == 2);
}

TEST_CASE("stability verification accepts outputs and rejects bad partitions") {
    DerivationGraph g = hidden_three_state(1, 2);
    Partition good = coarsest_lumpable_partition(g, kTauOnly);
    CHECK_NOTHROW(verify_stability(g, good, kTauOnly));

    Partition bad;
    bad.blocks = {{0, 2}, {1}};
    bad.block_of = {0, 1, 0};
    CHECK_THROWS_AS(verify_stability(g, bad, kTauOnly), InternalError);
}

TEST_CASE("merging any two output blocks breaks stability") {
    std::mt19937_64 rng(1812);
    for (int i = 0; i < 60; ++i) {
        ModelEnv env = testgen::random_model(rng);
        DerivationGraph g = derive_graph(env, env.system, 100000);
        if (g.state_count() > 7) continue;
        Partition p = coarsest_lumpable_partition(g, kTauOnly);
        for (std::size_t a = 0; a < p.block_count(); ++a) {
            for (std::size_t b = a + 1; b < p.block_count(); ++b) {
                oracle::BlockOf merged = p.block_of;
                for (auto& blk : merged)
                    if (blk == b) blk = static_cast<std::uint32_t>(a);
                CHECK_FALSE(oracle::is_stable(g, merged, kTauOnly));
            }
        }
    }
}

TEST_CASE("enlarging the ignored set never refines the partition") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 120; ++i) {
        ModelEnv env = testgen::random_model(rng);
        DerivationGraph g = derive_graph(env, env.system, 100000);
        Partition tau_only = coarsest_lumpable_partition(g, kTauOnly);
        Partition up_to_high = coarsest_lumpable_partition(g, {"tau", "h"});
        for (std::uint32_t s = 0; s < g.state_count(); ++s)
            for (std::uint32_t t = s + 1; t < g.state_count(); ++t)
                if (tau_only.same_block(s, t)) CHECK(up_to_high.same_block(s, t));
    }
}

TEST_CASE("lumpable bisimilarity is a congruence for evaluation contexts") {
    std::mt19937_64 rng(60902);
    int exercised = 0;
    for (int i = 0; i < 40; ++i) {
        testgen::GenOptions opt;
        opt.max_constants = 4;
        ModelEnv env = testgen::random_model(rng, opt);
        ModelEnv split = testgen::rate_split(env, rng);

        auto equivalent_roots = [&](const ModelEnv& e1, const ModelEnv& e2,
                                    auto rewrap) {
            ModelEnv w1 = e1, w2 = e2;
            rewrap(w1);
            rewrap(w2);
            UnionGraph u = union_graph(derive_graph(w1, w1.system, 100000),
                                       derive_graph(w2, w2.system, 100000));
            return equivalent(u.graph, u.root1, u.root2, kTauOnly);
        };

        // The split model is lumpably bisimilar by construction.
        REQUIRE(equivalent_roots(env, split, [](ModelEnv&) {}));

        // Prefix context: a.P1 vs a.P2. The system moves behind a fresh
        // constant so the prefix continuation stays sequential.
        CHECK(equivalent_roots(env, split, [&](ModelEnv& e) {
            e.defs.emplace("Wrapped", e.system);
            e.system = Term::prefix({"ctx", fin(2)}, Term::constant("Wrapped"));
        }));

        // Cooperation context: P1 <a> Q vs P2 <a> Q.
        CHECK(equivalent_roots(env, split, [](ModelEnv& e) {
            e.system = Term::cooperation(e.system, {"a"}, e.system);
        }));

        // Hiding context: P1 / {a} vs P2 / {a}.
        CHECK(equivalent_roots(env, split, [](ModelEnv& e) {
            e.system = Term::hiding(e.system, {"a"});
        }));
        ++exercised;
    }
    CHECK(exercised > 0);
}

TEST_CASE("an initial partition is only ever refined") {
    DerivationGraph g = hidden_three_state(1, 1);  // lumps to one block alone
    Partition initial;
    initial.blocks = {{0}, {1, 2}};
    initial.block_of = {0, 1, 1};
    Partition p = coarsest_lumpable_partition(g, kTauOnly, &initial);
    // States 0 and 1 may not re-merge across the initial boundary.
    CHECK_FALSE(p.same_block(0, 1));
    for (std::uint32_t s = 0; s < 3; ++s)
        for (std::uint32_t t = s + 1; t < 3; ++t)
            if (p.same_block(s, t)) CHECK(initial.same_block(s, t));
}

TEST_CASE("refinement matches the oracle on random small graphs") {
    std::mt19937_64 rng(140914);
    int compared = 0;
    for (int i = 0; i < 150 && compared < 60; ++i) {
        testgen::GenOptions opt;
        opt.max_constants = 4;
        ModelEnv env = testgen::random_model(rng, opt);
        DerivationGraph g = derive_graph(env, env.system, 100000);
        if (g.state_count() > 5) continue;
        CHECK(matches_oracle(g, kTauOnly));
        CHECK(matches_oracle(g, {"tau", "h"}));
        ++compared;
    }
    CHECK(compared >= 30);
}

TEST_CASE("every lumping invocation in this binary was verified") {
    LumpingStats stats = lumping_stats();
    CHECK(stats.invocations > 0);
    CHECK(stats.invocations == stats.verified);
}
