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

#include "security.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include "ctmc.hpp"
#include "errors.hpp"
#include "parser.hpp"

namespace pepa {
namespace {

std::set<std::string> with_tau(std::set<std::string> actions) {
    actions.insert(kTau);
    return actions;
}

void sort_transitions(std::vector<Transition>& ts) {
    std::sort(ts.begin(), ts.end(), [](const Transition& a, const Transition& b) {
        if (a.source != b.source) return a.source < b.source;
        if (a.action != b.action) return a.action < b.action;
        if (a.target != b.target) return a.target < b.target;
        return a.rate.is_passive() < b.rate.is_passive();
    });
}

}  // namespace

RestrictedGraph restrict_high(const DerivationGraph& g,
                              const std::set<std::string>& high) {
    if (high.count(kTau))
        throw IllFormedTermError("tau cannot be a high action");

    std::size_t n = g.state_count();
    RestrictedGraph out;
    out.image.assign(n, std::nullopt);
    if (n == 0) return out;

    // Reachability over the surviving arcs, visiting targets in stored
    // (deterministic) order.
    out.image[DerivationGraph::kRoot] = 0;
    out.graph.states.push_back(g.states[DerivationGraph::kRoot]);
    std::deque<std::uint32_t> frontier{DerivationGraph::kRoot};
    while (!frontier.empty()) {
        std::uint32_t src = frontier.front();
        frontier.pop_front();
        auto [begin, end] = g.outgoing[src];
        for (std::uint32_t k = begin; k < end; ++k) {
            const Transition& t = g.transitions[k];
            if (high.count(t.action)) continue;
            if (!out.image[t.target]) {
                out.image[t.target] =
                    static_cast<std::uint32_t>(out.graph.states.size());
                out.graph.states.push_back(g.states[t.target]);
                frontier.push_back(t.target);
            }
        }
    }

    for (const Transition& t : g.transitions) {
        if (high.count(t.action)) continue;
        if (!out.image[t.source]) continue;
        out.graph.transitions.push_back({*out.image[t.source], t.action, t.rate,
                                         t.multiplicity, *out.image[t.target]});
    }
    sort_transitions(out.graph.transitions);
    out.graph.rebuild_index();
    return out;
}

DerivationGraph hide_high(const DerivationGraph& g,
                          const std::set<std::string>& high) {
    if (high.count(kTau))
        throw IllFormedTermError("tau cannot be a high action");

    DerivationGraph out;
    out.states = g.states;

    struct Agg {
        std::optional<Rate> rate;
        std::uint32_t multiplicity = 0;
    };
    std::map<std::tuple<std::uint32_t, std::string, bool, std::uint32_t>, Agg> cells;
    for (const Transition& t : g.transitions) {
        std::string action = high.count(t.action) ? kTau : t.action;
        auto& slot = cells[{t.source, std::move(action), t.rate.is_passive(),
                            t.target}];
        slot.rate = slot.rate ? rate_add(*slot.rate, t.rate) : t.rate;
        slot.multiplicity += t.multiplicity;
    }
    out.transitions.reserve(cells.size());
    for (auto& [key, slot] : cells)
        out.transitions.push_back({std::get<0>(key), std::get<1>(key),
                                   std::move(*slot.rate), slot.multiplicity,
                                   std::get<3>(key)});
    sort_transitions(out.transitions);
    out.rebuild_index();
    return out;
}

PsniVerdict check_psni_bisim(const ModelEnv& env, std::size_t max_states) {
    DerivationGraph g = derive_graph(env, env.system, max_states);
    RestrictedGraph restricted = restrict_high(g, env.high);
    UnionGraph u = union_graph(restricted.graph, g);
    Partition p = coarsest_lumpable_partition(u.graph, with_tau(env.high));

    PsniVerdict verdict;
    verdict.method = CheckMethod::Bisim;
    verdict.state_count = g.state_count();
    verdict.holds = p.same_block(u.root1, u.root2);
    for (const auto& block : p.blocks) verdict.block_sizes.push_back(block.size());

    std::string root_label = render_term(g.states[DerivationGraph::kRoot]);
    verdict.notes.push_back(
        "bisim: restricted root vs root '" + root_label + "': " +
        (verdict.holds ? "equivalent up to high actions" : "NOT equivalent"));
    if (!verdict.holds) {
        Witness w;
        w.source = u.root1;
        w.target = u.root2;
        w.source_label = root_label + " restricted to low actions";
        w.target_label = root_label;
        w.root_pair = true;
        verdict.witness = std::move(w);
    }
    return verdict;
}

PsniVerdict check_psni_unwinding(const ModelEnv& env, std::size_t max_states) {
    DerivationGraph g = derive_graph(env, env.system, max_states);
    RestrictedGraph restricted = restrict_high(g, env.high);
    Partition low = coarsest_lumpable_partition(restricted.graph, {kTau});

    PsniVerdict verdict;
    verdict.method = CheckMethod::Unwinding;
    verdict.state_count = g.state_count();
    verdict.holds = true;
    for (const auto& block : low.blocks) verdict.block_sizes.push_back(block.size());

    // Transitions are already in (source, action, target) order, which fixes
    // the witness deterministically.
    for (const Transition& t : g.transitions) {
        if (!env.high.count(t.action)) continue;
        bool ok;
        if (restricted.image[t.source] && restricted.image[t.target]) {
            ok = low.same_block(*restricted.image[t.source],
                                *restricted.image[t.target]);
        } else {
            // The endpoint fell out of the globally restricted graph; rebuild
            // the restricted views from the endpoints themselves.
            RestrictedGraph from_src =
                restrict_high(derive_graph(env, g.states[t.source], max_states),
                              env.high);
            RestrictedGraph from_dst =
                restrict_high(derive_graph(env, g.states[t.target], max_states),
                              env.high);
            UnionGraph u = union_graph(from_src.graph, from_dst.graph);
            ok = equivalent(u.graph, u.root1, u.root2, {kTau});
        }
        std::string line = "unwinding: " + render_term(g.states[t.source]) +
                           " --(" + t.action + ", " + to_string(t.rate) +
                           ")--> " + render_term(g.states[t.target]) +
                           ": restricted views " +
                           (ok ? "lumpably bisimilar" : "NOT lumpably bisimilar");
        verdict.notes.push_back(std::move(line));
        if (!ok && verdict.holds) {
            verdict.holds = false;
            Witness w;
            w.source = t.source;
            w.action = t.action;
            w.target = t.target;
            w.rate = to_string(t.rate);
            w.source_label = render_term(g.states[t.source]);
            w.target_label = render_term(g.states[t.target]);
            verdict.witness = std::move(w);
        }
    }
    if (verdict.notes.empty())
        verdict.notes.push_back("unwinding: no high transitions; holds vacuously");
    return verdict;
}

PsniVerdict check_psni(const ModelEnv& env, CheckMethod method,
                       std::size_t max_states) {
    if (method == CheckMethod::Bisim) return check_psni_bisim(env, max_states);
    if (method == CheckMethod::Unwinding)
        return check_psni_unwinding(env, max_states);

    PsniVerdict bisim = check_psni_bisim(env, max_states);
    PsniVerdict unwinding = check_psni_unwinding(env, max_states);
    if (bisim.holds != unwinding.holds)
        throw InternalError(
            "the bisimulation and unwinding characterizations disagree; "
            "this is a bug");

    PsniVerdict verdict;
    verdict.method = CheckMethod::Both;
    verdict.holds = bisim.holds;
    verdict.state_count = bisim.state_count;
    verdict.block_sizes = bisim.block_sizes;
    verdict.witness = unwinding.witness ? unwinding.witness : bisim.witness;
    verdict.notes = bisim.notes;
    verdict.notes.insert(verdict.notes.end(), unwinding.notes.begin(),
                         unwinding.notes.end());
    return verdict;
}

LowViewReport low_view_report(const ModelEnv& env, std::size_t max_states) {
    DerivationGraph g = derive_graph(env, env.system, max_states);
    DerivationGraph hidden = hide_high(g, env.high);
    RestrictedGraph restricted = restrict_high(g, env.high);

    SteadyState hidden_pi = steady_state(build_generator(hidden));
    SteadyState restricted_pi = steady_state(build_generator(restricted.graph));

    LowViewReport report;
    for (std::uint32_t s = 0; s < hidden.state_count(); ++s)
        report.hidden.push_back({s, render_term(hidden.states[s]), hidden_pi.probs[s]});
    for (std::uint32_t s = 0; s < restricted.graph.state_count(); ++s)
        report.restricted.push_back(
            {s, render_term(restricted.graph.states[s]), restricted_pi.probs[s]});

    UnionGraph u = union_graph(hidden, restricted.graph);
    Partition p = coarsest_lumpable_partition(u.graph, {kTau});
    std::uint32_t offset = u.root2;
    for (const auto& block : p.blocks) {
        LowViewReport::ClassRow row;
        row.label = render_term(u.graph.states[block.front()]);
        row.hidden_prob = 0.0;
        row.restricted_prob = 0.0;
        for (std::uint32_t s : block) {
            if (s < offset)
                row.hidden_prob += hidden_pi.probs[s];
            else
                row.restricted_prob += restricted_pi.probs[s - offset];
        }
        row.agree = std::fabs(row.hidden_prob - row.restricted_prob) <= 1e-9;
        report.classes.push_back(std::move(row));
    }
    return report;
}

}  // namespace pepa
