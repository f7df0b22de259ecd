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

#include "terms.hpp"

#include <algorithm>
#include <functional>

#include "errors.hpp"

namespace pepa {
namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_string(const std::string& s) {
    return std::hash<std::string>{}(s);
}

std::size_t hash_rate(const Rate& r) {
    return mix(r.is_passive() ? 0x70 : 0x66, hash_string(to_string(r.value())));
}

std::vector<std::string> normalize_set(std::vector<std::string> set,
                                       const char* combinator) {
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    for (const auto& a : set) {
        if (is_tau(a))
            throw IllFormedTermError(std::string("tau may not appear in a ") +
                                     combinator + " set");
        if (a.empty()) throw IllFormedTermError("empty action name");
    }
    return set;
}

std::size_t hash_set(const std::vector<std::string>& set) {
    std::size_t h = set.size();
    for (const auto& a : set) h = mix(h, hash_string(a));
    return h;
}

}  // namespace

bool operator==(const Activity& a, const Activity& b) {
    return a.action == b.action && a.rate == b.rate;
}

const Activity& Term::activity() const { return *activity_; }
const TermPtr& Term::continuation() const { return a_; }
const TermPtr& Term::left() const { return a_; }
const TermPtr& Term::right() const { return b_; }
const TermPtr& Term::inner() const { return a_; }
const std::vector<std::string>& Term::action_set() const { return set_; }
const std::string& Term::name() const { return name_; }

TermPtr Term::prefix(Activity activity, TermPtr continuation) {
    if (!continuation) throw IllFormedTermError("prefix without continuation");
    auto t = std::shared_ptr<Term>(new Term());
    t->kind_ = TermKind::Prefix;
    t->hash_ = mix(mix(1, hash_string(activity.action)), hash_rate(activity.rate));
    t->hash_ = mix(t->hash_, continuation->hash());
    t->activity_ = std::make_unique<Activity>(std::move(activity));
    t->a_ = std::move(continuation);
    return t;
}

TermPtr Term::choice(TermPtr left, TermPtr right) {
    if (!left || !right) throw IllFormedTermError("choice without both operands");
    auto t = std::shared_ptr<Term>(new Term());
    t->kind_ = TermKind::Choice;
    t->hash_ = mix(mix(2, left->hash()), right->hash());
    t->a_ = std::move(left);
    t->b_ = std::move(right);
    return t;
}

TermPtr Term::cooperation(TermPtr left, std::vector<std::string> coop_set,
                          TermPtr right) {
    if (!left || !right)
        throw IllFormedTermError("cooperation without both operands");
    auto t = std::shared_ptr<Term>(new Term());
    t->kind_ = TermKind::Cooperation;
    t->set_ = normalize_set(std::move(coop_set), "cooperation");
    t->hash_ = mix(mix(mix(3, left->hash()), hash_set(t->set_)), right->hash());
    t->a_ = std::move(left);
    t->b_ = std::move(right);
    return t;
}

TermPtr Term::hiding(TermPtr inner, std::vector<std::string> hide_set) {
    if (!inner) throw IllFormedTermError("hiding without operand");
    auto t = std::shared_ptr<Term>(new Term());
    t->kind_ = TermKind::Hiding;
    t->set_ = normalize_set(std::move(hide_set), "hiding");
    t->hash_ = mix(mix(4, inner->hash()), hash_set(t->set_));
    t->a_ = std::move(inner);
    return t;
}

TermPtr Term::constant(std::string name) {
    if (name.empty()) throw IllFormedTermError("empty constant name");
    auto t = std::shared_ptr<Term>(new Term());
    t->kind_ = TermKind::Constant;
    t->hash_ = mix(5, hash_string(name));
    t->name_ = std::move(name);
    return t;
}

bool structurally_equal(const Term& a, const Term& b) {
    if (&a == &b) return true;
    if (a.hash() != b.hash() || a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case TermKind::Prefix:
            return a.activity() == b.activity() &&
                   structurally_equal(a.continuation(), b.continuation());
        case TermKind::Choice:
            return structurally_equal(a.left(), b.left()) &&
                   structurally_equal(a.right(), b.right());
        case TermKind::Cooperation:
            return a.action_set() == b.action_set() &&
                   structurally_equal(a.left(), b.left()) &&
                   structurally_equal(a.right(), b.right());
        case TermKind::Hiding:
            return a.action_set() == b.action_set() &&
                   structurally_equal(a.inner(), b.inner());
        case TermKind::Constant:
            return a.name() == b.name();
    }
    return false;
}

bool structurally_equal(const TermPtr& a, const TermPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return structurally_equal(*a, *b);
}

namespace {

std::string find_stratification_violation(const TermPtr& t, bool sequential) {
    switch (t->kind()) {
        case TermKind::Constant:
            return {};
        case TermKind::Prefix:
            return find_stratification_violation(t->continuation(), true);
        case TermKind::Choice: {
            auto v = find_stratification_violation(t->left(), true);
            if (!v.empty()) return v;
            return find_stratification_violation(t->right(), true);
        }
        case TermKind::Cooperation: {
            if (sequential) return "cooperation inside a prefix or choice";
            auto v = find_stratification_violation(t->left(), false);
            if (!v.empty()) return v;
            return find_stratification_violation(t->right(), false);
        }
        case TermKind::Hiding: {
            if (sequential) return "hiding inside a prefix or choice";
            return find_stratification_violation(t->inner(), false);
        }
    }
    return {};
}

}  // namespace

std::string check_stratification(const TermPtr& t) {
    return find_stratification_violation(t, false);
}

ActionClass classify(const ModelEnv& env, const std::string& action) {
    if (is_tau(action)) return ActionClass::Tau;
    if (env.high.count(action)) return ActionClass::High;
    return ActionClass::Low;
}

}  // namespace pepa
