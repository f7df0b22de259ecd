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
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "terms.hpp"

namespace pepa {

/// One derivation of the operational rules: an enabled activity and the
/// component it leads to. one_step returns these as a multiset (duplicates
/// are distinct derivations and count).
struct Step {
    Activity activity;
    TermPtr target;
};

/// The multiset of activities enabled in t together with their targets,
/// exactly as derived by the operational rules: a prefix fires its activity;
/// a choice offers both sides; hiding relabels hidden types to tau; constants
/// unfold; cooperation interleaves on non-shared types and synchronizes on
/// shared ones with rate (r1/ra(P)) * (r2/ra(Q)) * min(ra(P), ra(Q)).
std::vector<Step> one_step(const ModelEnv& env, const TermPtr& t);

/// Total rate at which t can perform actions of the given type, or nullopt
/// when the type is not enabled. Computed compositionally; agrees with
/// summing one_step activities of that type.
std::optional<Rate> apparent_rate(const ModelEnv& env, const TermPtr& t,
                                  const std::string& action);

/// The set of action types t may next engage in.
std::set<std::string> current_action_types(const ModelEnv& env, const TermPtr& t);

/// Aggregated arc of the labelled multi-transition system: rate sums all
/// parallel derivations of (source, action, target) with the same rate kind,
/// multiplicity counts them. Finite and passive arcs between the same pair
/// stay separate records.
struct Transition {
    std::uint32_t source;
    std::string action;
    Rate rate;
    std::uint32_t multiplicity;
    std::uint32_t target;
};

/// Labelled multi-transition system over the reachable derivatives of a root
/// component. State 0 is the root; numbering is breadth-first discovery order
/// with ties broken by the canonical rendering of the target terms, so two
/// derivations of the same model are identical. Transitions are sorted by
/// (source, action, target, rate kind) and indexed per source.
struct DerivationGraph {
    std::vector<TermPtr> states;
    std::vector<Transition> transitions;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> outgoing;  // [begin,end) per state

    static constexpr std::uint32_t kRoot = 0;

    std::size_t state_count() const { return states.size(); }

    /// Recomputes the per-state transition spans; transitions must be sorted
    /// by source.
    void rebuild_index();
};

inline constexpr std::size_t kDefaultMaxStates = 100000;

/// Breadth-first closure of one_step from root. Throws StateSpaceExceededError
/// when more than max_states states are reachable.
DerivationGraph derive_graph(const ModelEnv& env, const TermPtr& root,
                             std::size_t max_states = kDefaultMaxStates);

}  // namespace pepa
