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

#include <gmpxx.h>

#include <string>

#include "errors.hpp"

namespace pepa {

/// Exact rational number. All rate arithmetic is exact; floating point only
/// appears inside the steady-state solver.
using Rational = mpq_class;

Rational make_rational(long num, long den = 1);
std::string to_string(const Rational& q);
double to_double(const Rational& q);

/// Activity rate: either a finite (strictly positive) rational, or a passive
/// weight w standing for w*T. Every finite rate orders below every passive one;
/// passive rates order by weight.
class Rate {
public:
    static Rate finite(Rational value);
    static Rate passive(Rational weight);

    bool is_passive() const noexcept { return passive_; }
    bool is_finite() const noexcept { return !passive_; }

    /// The rate when finite, the weight when passive.
    const Rational& value() const noexcept { return value_; }

    friend bool operator==(const Rate& a, const Rate& b) {
        return a.passive_ == b.passive_ && a.value_ == b.value_;
    }
    friend bool operator!=(const Rate& a, const Rate& b) { return !(a == b); }
    friend bool operator<(const Rate& a, const Rate& b) {
        if (a.passive_ != b.passive_) return b.passive_;
        return a.value_ < b.value_;
    }

private:
    Rate(bool passive, Rational value);

    bool passive_;
    Rational value_;
};

/// Sum of same-kind rates; throws MixedRateSumError on finite + passive.
Rate rate_add(const Rate& a, const Rate& b);

/// Minimum under the finite-below-passive order.
Rate rate_min(const Rate& a, const Rate& b);

/// "3/2", "T", "2*T", "3/2*T".
std::string to_string(const Rate& r);

/// Numeric view: the rate for finite values, the weight for passive ones.
double to_double(const Rate& r);

/// Total conditional rate: finite and passive contributions accumulated
/// separately, so mixed aggregates stay representable and never compare equal
/// to pure ones. Both parts are >= 0; (0, 0) means no transitions.
struct RateTotal {
    Rational finite{0};
    Rational passive_weight{0};

    void add(const Rate& r);
    void add(const RateTotal& other);
    bool is_zero() const { return finite == 0 && passive_weight == 0; }

    friend bool operator==(const RateTotal& a, const RateTotal& b) {
        return a.finite == b.finite && a.passive_weight == b.passive_weight;
    }
    friend bool operator!=(const RateTotal& a, const RateTotal& b) { return !(a == b); }
};

/// Three-way order used to canonicalize signatures.
int compare(const RateTotal& a, const RateTotal& b);

std::string to_string(const RateTotal& t);

}  // namespace pepa
