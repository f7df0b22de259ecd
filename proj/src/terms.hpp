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

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "rate.hpp"

namespace pepa {

/// The reserved unknown action type. Never user-declarable; produced by hiding.
inline const std::string kTau = "tau";

inline bool is_tau(const std::string& action) { return action == kTau; }

/// An action type paired with its rate.
struct Activity {
    std::string action;
    Rate rate;
};

bool operator==(const Activity& a, const Activity& b);

enum class TermKind { Prefix, Choice, Cooperation, Hiding, Constant };

class Term;
using TermPtr = std::shared_ptr<const Term>;

/// Immutable component term. Values are shared freely across threads; identity
/// everywhere downstream is structural equality without constant unfolding
/// (constants compare by name), which keeps cyclic definitions finite-state.
///
/// Factories enforce that tau never enters a cooperation or hiding set. The
/// sequential/model stratification of the grammar is enforced by the parser,
/// with check_stratification available for programmatically built terms.
class Term {
public:
    TermKind kind() const noexcept { return kind_; }

    const Activity& activity() const;            // Prefix
    const TermPtr& continuation() const;         // Prefix
    const TermPtr& left() const;                 // Choice, Cooperation
    const TermPtr& right() const;                // Choice, Cooperation
    const TermPtr& inner() const;                // Hiding
    const std::vector<std::string>& action_set() const;  // Cooperation, Hiding
    const std::string& name() const;             // Constant

    std::size_t hash() const noexcept { return hash_; }

    static TermPtr prefix(Activity activity, TermPtr continuation);
    static TermPtr choice(TermPtr left, TermPtr right);
    static TermPtr cooperation(TermPtr left, std::vector<std::string> coop_set,
                               TermPtr right);
    static TermPtr hiding(TermPtr inner, std::vector<std::string> hide_set);
    static TermPtr constant(std::string name);

private:
    Term() = default;

    TermKind kind_{TermKind::Constant};
    std::unique_ptr<Activity> activity_;
    TermPtr a_, b_;                   // Prefix: a_ = continuation; Hiding: a_ = inner
    std::vector<std::string> set_;
    std::string name_;
    std::size_t hash_ = 0;
};

bool structurally_equal(const Term& a, const Term& b);
bool structurally_equal(const TermPtr& a, const TermPtr& b);

struct TermPtrHash {
    std::size_t operator()(const TermPtr& t) const noexcept { return t->hash(); }
};
struct TermPtrEq {
    bool operator()(const TermPtr& a, const TermPtr& b) const {
        return structurally_equal(a, b);
    }
};

/// Returns a description of the first Cooperation or Hiding node found strictly
/// inside a Prefix or Choice, or empty when the term respects the grammar
/// strata. Constants are opaque here; their definitions are checked separately.
std::string check_stratification(const TermPtr& t);

/// A parsed model: constant definitions, the high action partition, and the
/// designated root component.
struct ModelEnv {
    std::map<std::string, TermPtr> defs;
    std::set<std::string> high;
    TermPtr system;
};

enum class ActionClass { Tau, High, Low };

ActionClass classify(const ModelEnv& env, const std::string& action);

}  // namespace pepa
