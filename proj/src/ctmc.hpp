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

#pragma once

#include <cstdint>
#include <vector>

#include "semantics.hpp"

namespace pepa {

/// Sparse infinitesimal generator of the underlying Markov chain. Off-diagonal
/// entries are exact positive rationals; each diagonal entry is the negated
/// row sum, so rows sum to zero exactly.
struct Generator {
    struct Entry {
        std::uint32_t row;
        std::uint32_t col;
        Rational rate;
    };

    std::size_t n = 0;
    std::vector<Entry> off_diag;   // sorted by (row, col), row != col
    std::vector<Rational> diag;
};

/// Assembles the generator: q(i,j) sums all arc rates i -> j regardless of
/// action type; self-loops are dropped. Throws PassiveRateReachableError if
/// any reachable arc still carries a passive rate.
Generator build_generator(const DerivationGraph& g);

/// Sum of the rates of action-labelled arcs i -> j (i == j included).
RateTotal conditional_rate(const DerivationGraph& g, std::uint32_t i,
                           std::uint32_t j, const std::string& action);

/// q[i, S, action] = sum over j in S of conditional_rate(i, j, action).
RateTotal total_conditional_rate(const DerivationGraph& g, std::uint32_t i,
                                 const std::vector<std::uint32_t>& targets,
                                 const std::string& action);

/// Strongly connected components of the off-diagonal adjacency, in a
/// deterministic order.
std::vector<std::vector<std::uint32_t>> strongly_connected_components(
    const Generator& q);

struct SteadyState {
    std::vector<double> probs;
    double residual = 0.0;  // max-norm of pi * Q
};

struct SteadyOptions {
    /// Below this dimension the balance equations are solved by dense Gaussian
    /// elimination with partial pivoting; at or above it, by power iteration on
    /// the uniformized chain.
    std::size_t dense_threshold = 2000;
    std::size_t max_iterations = 2000000;
    double iteration_tolerance = 1e-15;
};

/// Unique solution of pi * Q = 0 with sum(pi) = 1. Requires an irreducible
/// chain; otherwise throws NotIrreducibleError naming the terminal components.
SteadyState steady_state(const Generator& q, const SteadyOptions& options = {});

}  // namespace pepa
