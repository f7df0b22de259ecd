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
#include <stdexcept>
#include <string>
#include <vector>

namespace pepa {

/// Base class for all errors raised by the library.
class PepaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A finite rate and a passive weight were added into one apparent rate.
class MixedRateSumError : public PepaError {
public:
    using PepaError::PepaError;
};

/// A constant is referenced but has no defining equation.
class UndefinedConstantError : public PepaError {
public:
    explicit UndefinedConstantError(std::string constant)
        : PepaError("undefined constant '" + constant + "'"),
          constant_(std::move(constant)) {}
    const std::string& constant() const noexcept { return constant_; }

private:
    std::string constant_;
};

/// Constant definitions recurse without passing through a prefix.
class UnguardedRecursionError : public PepaError {
public:
    explicit UnguardedRecursionError(std::string constant)
        : PepaError("unguarded recursion through constant '" + constant + "'"),
          constant_(std::move(constant)) {}
    const std::string& constant() const noexcept { return constant_; }

private:
    std::string constant_;
};

/// A term violates a structural invariant (tau in a set, nonpositive rate, ...).
class IllFormedTermError : public PepaError {
public:
    using PepaError::PepaError;
};

/// State-space exploration hit the configured cap.
class StateSpaceExceededError : public PepaError {
public:
    explicit StateSpaceExceededError(std::size_t limit)
        : PepaError("state space exceeds the configured limit of " +
                    std::to_string(limit) + " states"),
          limit_(limit) {}
    std::size_t limit() const noexcept { return limit_; }

private:
    std::size_t limit_;
};

/// A passive rate survives in a graph handed to CTMC construction.
class PassiveRateReachableError : public PepaError {
public:
    PassiveRateReachableError(std::uint32_t state, std::string action)
        : PepaError("passive rate reachable: state " + std::to_string(state) +
                    " enables '" + action + "' with an unspecified rate"),
          state_(state),
          action_(std::move(action)) {}
    std::uint32_t state() const noexcept { return state_; }
    const std::string& action() const noexcept { return action_; }

private:
    std::uint32_t state_;
    std::string action_;
};

/// The CTMC is not one strongly connected class; carries the terminal components.
class NotIrreducibleError : public PepaError {
public:
    NotIrreducibleError(std::string message,
                        std::vector<std::vector<std::uint32_t>> bottom_components)
        : PepaError(std::move(message)),
          bottom_components_(std::move(bottom_components)) {}
    const std::vector<std::vector<std::uint32_t>>& bottom_components() const noexcept {
        return bottom_components_;
    }

private:
    std::vector<std::vector<std::uint32_t>> bottom_components_;
};

/// The balance system could not be solved; unreachable for irreducible chains.
class SingularSystemError : public PepaError {
public:
    using PepaError::PepaError;
};

/// An internal consistency check failed; always a bug, never user input.
class InternalError : public PepaError {
public:
    using PepaError::PepaError;
};

}  // namespace pepa
