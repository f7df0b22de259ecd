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

#include "rate.hpp"

namespace pepa {

Rational make_rational(long num, long den) {
    if (den == 0) throw IllFormedTermError("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q) {
    return q.get_str();
}

double to_double(const Rational& q) {
    return q.get_d();
}

Rate::Rate(bool passive, Rational value) : passive_(passive), value_(std::move(value)) {}

Rate Rate::finite(Rational value) {
    if (value <= 0) throw IllFormedTermError("finite rates must be strictly positive");
    return Rate(false, std::move(value));
}

Rate Rate::passive(Rational weight) {
    if (weight <= 0) throw IllFormedTermError("passive weights must be strictly positive");
    return Rate(true, std::move(weight));
}

Rate rate_add(const Rate& a, const Rate& b) {
    if (a.is_passive() != b.is_passive())
        throw MixedRateSumError("cannot add a finite rate and a passive weight");
    Rational sum = a.value() + b.value();
    return a.is_passive() ? Rate::passive(std::move(sum)) : Rate::finite(std::move(sum));
}

Rate rate_min(const Rate& a, const Rate& b) {
    return a < b ? a : b;
}

std::string to_string(const Rate& r) {
    if (r.is_finite()) return to_string(r.value());
    if (r.value() == 1) return "T";
    return to_string(r.value()) + "*T";
}

double to_double(const Rate& r) {
    return to_double(r.value());
}

void RateTotal::add(const Rate& r) {
    if (r.is_passive())
        passive_weight += r.value();
    else
        finite += r.value();
}

void RateTotal::add(const RateTotal& other) {
    finite += other.finite;
    passive_weight += other.passive_weight;
}

int compare(const RateTotal& a, const RateTotal& b) {
    int c = cmp(a.finite, b.finite);
    if (c != 0) return c;
    return cmp(a.passive_weight, b.passive_weight);
}

std::string to_string(const RateTotal& t) {
    if (t.is_zero()) return "0";
    if (t.passive_weight == 0) return to_string(t.finite);
    std::string passive =
        t.passive_weight == 1 ? "T" : to_string(t.passive_weight) + "*T";
    if (t.finite == 0) return passive;
    return to_string(t.finite) + " + " + passive;
}

}  // namespace pepa
