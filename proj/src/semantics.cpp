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

#include "semantics.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>

#include "errors.hpp"
#include "parser.hpp"

namespace pepa {
namespace {

const TermPtr& lookup(const ModelEnv& env, const std::string& name) {
    auto it = env.defs.find(name);
    if (it == env.defs.end()) throw UndefinedConstantError(name);
    return it->second;
}

bool in_set(const std::vector<std::string>& set, const std::string& a) {
    return std::binary_search(set.begin(), set.end(), a);
}

/// Shared-activity rate from the contributing rates and both apparent rates.
/// The probability fractions are same-kind by construction (a mixed apparent
/// rate would already have failed), so each fraction is a plain rational; the
/// minimum decides whether the result is finite or passive.
Rate cooperation_rate(const Rate& r1, const Rate& apparent_left, const Rate& r2,
                      const Rate& apparent_right) {
    Rational frac1 = r1.value() / apparent_left.value();
    Rational frac2 = r2.value() / apparent_right.value();
    const Rate& slower = rate_min(apparent_left, apparent_right);
    Rational value = frac1 * frac2 * slower.value();
    return slower.is_passive() ? Rate::passive(std::move(value))
                               : Rate::finite(std::move(value));
}

class Deriver {
public:
    explicit Deriver(const ModelEnv& env) : env_(env) {}

    std::vector<Step> steps(const TermPtr& t) { return steps(t, 0); }

private:
    std::vector<Step> steps(const TermPtr& t, std::size_t unfold_depth) {
        std::vector<Step> out;
        collect(t, unfold_depth, out);
        return out;
    }

    void collect(const TermPtr& t, std::size_t unfold_depth, std::vector<Step>& out) {
        switch (t->kind()) {
            case TermKind::Prefix:
                out.push_back({t->activity(), t->continuation()});
                return;
            case TermKind::Choice:
                collect(t->left(), unfold_depth, out);
                collect(t->right(), unfold_depth, out);
                return;
            case TermKind::Constant: {
                if (unfold_depth > env_.defs.size())
                    throw UnguardedRecursionError(t->name());
                collect(lookup(env_, t->name()), unfold_depth + 1, out);
                return;
            }
            case TermKind::Hiding: {
                std::vector<Step> inner = steps(t->inner(), unfold_depth);
                const auto& set = t->action_set();
                for (auto& s : inner) {
                    std::string action =
                        in_set(set, s.activity.action) ? kTau : s.activity.action;
                    out.push_back({Activity{std::move(action), s.activity.rate},
                                   Term::hiding(s.target, set)});
                }
                return;
            }
            case TermKind::Cooperation: {
                std::vector<Step> ls = steps(t->left(), unfold_depth);
                std::vector<Step> rs = steps(t->right(), unfold_depth);
                const auto& set = t->action_set();
                for (const auto& s : ls) {
                    if (in_set(set, s.activity.action)) continue;
                    out.push_back({s.activity,
                                   Term::cooperation(s.target, set, t->right())});
                }
                for (const auto& s : rs) {
                    if (in_set(set, s.activity.action)) continue;
                    out.push_back({s.activity,
                                   Term::cooperation(t->left(), set, s.target)});
                }
                for (const auto& shared : set) {
                    std::optional<Rate> al = apparent_of(ls, shared);
                    if (!al) continue;
                    std::optional<Rate> ar = apparent_of(rs, shared);
                    if (!ar) continue;
                    for (const auto& sl : ls) {
                        if (sl.activity.action != shared) continue;
                        for (const auto& sr : rs) {
                            if (sr.activity.action != shared) continue;
                            Rate rate = cooperation_rate(sl.activity.rate, *al,
                                                         sr.activity.rate, *ar);
                            out.push_back(
                                {Activity{shared, std::move(rate)},
                                 Term::cooperation(sl.target, set, sr.target)});
                        }
                    }
                }
                return;
            }
        }
    }

    static std::optional<Rate> apparent_of(const std::vector<Step>& steps,
                                           const std::string& action) {
        std::optional<Rate> total;
        for (const auto& s : steps) {
            if (s.activity.action != action) continue;
            total = total ? rate_add(*total, s.activity.rate) : s.activity.rate;
        }
        return total;
    }

    const ModelEnv& env_;
};

std::optional<Rate> add_opt(std::optional<Rate> a, std::optional<Rate> b) {
    if (!a) return b;
    if (!b) return a;
    return rate_add(*a, *b);
}

std::optional<Rate> apparent(const ModelEnv& env, const TermPtr& t,
                             const std::string& action, std::size_t unfold_depth) {
    switch (t->kind()) {
        case TermKind::Prefix:
            if (t->activity().action == action) return t->activity().rate;
            return std::nullopt;
        case TermKind::Choice:
            return add_opt(apparent(env, t->left(), action, unfold_depth),
                           apparent(env, t->right(), action, unfold_depth));
        case TermKind::Constant:
            if (unfold_depth > env.defs.size())
                throw UnguardedRecursionError(t->name());
            return apparent(env, lookup(env, t->name()), action, unfold_depth + 1);
        case TermKind::Hiding: {
            const auto& set = t->action_set();
            if (in_set(set, action)) return std::nullopt;
            std::optional<Rate> total =
                apparent(env, t->inner(), action, unfold_depth);
            if (is_tau(action)) {
                for (const auto& hidden : set)
                    total = add_opt(total,
                                    apparent(env, t->inner(), hidden, unfold_depth));
            }
            return total;
        }
        case TermKind::Cooperation: {
            std::optional<Rate> l = apparent(env, t->left(), action, unfold_depth);
            std::optional<Rate> r = apparent(env, t->right(), action, unfold_depth);
            if (in_set(t->action_set(), action)) {
                if (!l || !r) return std::nullopt;
                return rate_min(*l, *r);
            }
            return add_opt(std::move(l), std::move(r));
        }
    }
    return std::nullopt;
}

}  // namespace

std::vector<Step> one_step(const ModelEnv& env, const TermPtr& t) {
    return Deriver(env).steps(t);
}

std::optional<Rate> apparent_rate(const ModelEnv& env, const TermPtr& t,
                                  const std::string& action) {
    return apparent(env, t, action, 0);
}

std::set<std::string> current_action_types(const ModelEnv& env, const TermPtr& t) {
    std::set<std::string> out;
    for (const auto& s : one_step(env, t)) out.insert(s.activity.action);
    return out;
}

void DerivationGraph::rebuild_index() {
    outgoing.assign(states.size(), {0, 0});
    std::size_t i = 0;
    while (i < transitions.size()) {
        std::size_t j = i;
        std::uint32_t src = transitions[i].source;
        while (j < transitions.size() && transitions[j].source == src) ++j;
        outgoing[src] = {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)};
        i = j;
    }
}

DerivationGraph derive_graph(const ModelEnv& env, const TermPtr& root,
                             std::size_t max_states) {
    if (max_states < 1) throw IllFormedTermError("max_states must be at least 1");

    DerivationGraph g;
    std::unordered_map<TermPtr, std::uint32_t, TermPtrHash, TermPtrEq> index;
    g.states.push_back(root);
    index.emplace(root, 0);

    Deriver deriver(env);
    std::deque<std::uint32_t> frontier{0};

    while (!frontier.empty()) {
        std::uint32_t src = frontier.front();
        frontier.pop_front();

        // Aggregate derivations per (action, rate kind, target term); targets
        // are deduplicated structurally before ids are assigned.
        struct Agg {
            TermPtr target;
            std::optional<Rate> rate;
            std::uint32_t multiplicity = 0;
        };
        std::map<std::tuple<std::string, bool, std::size_t>, Agg> agg;
        std::unordered_map<TermPtr, std::size_t, TermPtrHash, TermPtrEq> local;
        std::vector<TermPtr> local_terms;

        for (const auto& step : one_step(env, g.states[src])) {
            auto [it, fresh] = local.emplace(step.target, local_terms.size());
            if (fresh) local_terms.push_back(step.target);
            auto key = std::make_tuple(step.activity.action,
                                       step.activity.rate.is_passive(), it->second);
            auto& slot = agg[key];
            slot.target = local_terms[it->second];
            slot.rate = slot.rate ? rate_add(*slot.rate, step.activity.rate)
                                  : step.activity.rate;
            slot.multiplicity += 1;
        }

        // Number unseen targets in canonical render order.
        std::vector<std::pair<std::string, TermPtr>> fresh_terms;
        for (const auto& t : local_terms) {
            if (!index.count(t)) fresh_terms.emplace_back(render_term(t), t);
        }
        std::sort(fresh_terms.begin(), fresh_terms.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& [label, term] : fresh_terms) {
            if (index.count(term)) continue;
            if (g.states.size() >= max_states)
                throw StateSpaceExceededError(max_states);
            std::uint32_t id = static_cast<std::uint32_t>(g.states.size());
            g.states.push_back(term);
            index.emplace(term, id);
            frontier.push_back(id);
        }

        std::vector<Transition> batch;
        batch.reserve(agg.size());
        for (auto& [key, slot] : agg) {
            batch.push_back({src, std::get<0>(key), std::move(*slot.rate),
                             slot.multiplicity, index.at(slot.target)});
        }
        std::sort(batch.begin(), batch.end(), [](const Transition& a, const Transition& b) {
            if (a.action != b.action) return a.action < b.action;
            if (a.target != b.target) return a.target < b.target;
            return a.rate.is_passive() < b.rate.is_passive();
        });
        for (auto& t : batch) g.transitions.push_back(std::move(t));
    }

    g.rebuild_index();
    return g;
}

}  // namespace pepa
