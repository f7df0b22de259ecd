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

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lumping.hpp"
#include "semantics.hpp"

namespace pepa {

/// Result of pruning high arcs: the restricted graph plus the image of each
/// original state (absent when the state became unreachable).
struct RestrictedGraph {
    DerivationGraph graph;
    std::vector<std::optional<std::uint32_t>> image;
};

/// The low view in isolation: high-labelled arcs deleted, unreachable states
/// pruned, root preserved as state 0.
RestrictedGraph restrict_high(const DerivationGraph& g,
                              const std::set<std::string>& high);

/// The low view under cooperation: high-labelled arcs relabelled to tau with
/// rates kept, then re-aggregated with any existing tau arcs.
DerivationGraph hide_high(const DerivationGraph& g,
                          const std::set<std::string>& high);

enum class CheckMethod { Bisim, Unwinding, Both };

struct Witness {
    std::uint32_t source = 0;
    std::string action;      // empty for the root pair of the bisim method
    std::uint32_t target = 0;
    std::string rate;
    std::string source_label;
    std::string target_label;
    bool root_pair = false;
};

struct PsniVerdict {
    bool holds = false;
    CheckMethod method = CheckMethod::Both;
    std::optional<Witness> witness;          // present iff !holds
    std::size_t state_count = 0;             // states of the model's graph
    std::vector<std::size_t> block_sizes;    // partition summary
    std::vector<std::string> notes;          // per-obligation diagnostics
};

/// Single-equivalence characterization: the system is secure iff its
/// restricted graph root and its full graph root share a block of the coarsest
/// lumpable partition with high and tau ignored into the own block.
PsniVerdict check_psni_bisim(const ModelEnv& env,
                             std::size_t max_states = kDefaultMaxStates);

/// Unwinding characterization: for every reachable high transition P' -> P'',
/// the restricted views of P' and P'' must be lumpably bisimilar. States
/// pruned from the global restricted graph are re-derived from their own
/// roots and compared through a union graph.
PsniVerdict check_psni_unwinding(const ModelEnv& env,
                                 std::size_t max_states = kDefaultMaxStates);

/// Dispatches on method; Both runs the two characterizations and treats any
/// disagreement as an internal error.
PsniVerdict check_psni(const ModelEnv& env, CheckMethod method,
                       std::size_t max_states = kDefaultMaxStates);

/// Steady states of the hidden and restricted views side by side, with the
/// classwise comparison of probabilities of lumpably equivalent states.
struct LowViewReport {
    struct StateProb {
        std::uint32_t state;
        std::string label;
        double prob;
    };
    struct ClassRow {
        std::string label;  // representative member
        double hidden_prob;
        double restricted_prob;
        bool agree;  // |difference| <= 1e-9
    };

    std::vector<StateProb> hidden;
    std::vector<StateProb> restricted;
    std::vector<ClassRow> classes;
};

LowViewReport low_view_report(const ModelEnv& env,
                              std::size_t max_states = kDefaultMaxStates);

}  // namespace pepa
