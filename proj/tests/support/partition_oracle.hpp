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

// Brute-force oracle for the coarsest lumpable partition: enumerates every
// set partition of the states, keeps the stable ones (checked directly with
// the conditional-rate primitives, independent of the refinement code), and
// returns the unique coarsest. Only sensible for small graphs.

#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctmc.hpp"
#include "semantics.hpp"

namespace oracle {

using BlockOf = std::vector<std::uint32_t>;

/// All set partitions of {0..n-1} as restricted growth strings.
inline std::vector<BlockOf> all_partitions(std::size_t n) {
    std::vector<BlockOf> out;
    BlockOf current(n, 0);
    auto rec = [&](auto&& self, std::size_t i, std::uint32_t max_used) -> void {
        if (i == n) {
            out.push_back(current);
            return;
        }
        for (std::uint32_t b = 0; b <= max_used + 1 && b <= i; ++b) {
            current[i] = b;
            self(self, i + 1, std::max(max_used, b));
        }
    };
    if (n > 0) rec(rec, 1, 0);
    if (n == 0) out.push_back({});
    return out;
}

inline std::vector<std::vector<std::uint32_t>> blocks_of(const BlockOf& block_of) {
    std::uint32_t max_block = 0;
    for (auto b : block_of) max_block = std::max(max_block, b);
    std::vector<std::vector<std::uint32_t>> blocks(block_of.empty() ? 0 : max_block + 1);
    for (std::uint32_t s = 0; s < block_of.size(); ++s)
        blocks[block_of[s]].push_back(s);
    return blocks;
}

/// Direct stability check: equal totals into every block for every action,
/// with ignored actions exempt into the pair's own block.
inline bool is_stable(const pepa::DerivationGraph& g, const BlockOf& block_of,
                      const std::set<std::string>& ignored) {
    auto blocks = blocks_of(block_of);
    std::set<std::string> actions;
    for (const auto& t : g.transitions) actions.insert(t.action);

    for (const auto& block : blocks) {
        for (std::size_t i = 0; i < block.size(); ++i) {
            for (std::size_t j = i + 1; j < block.size(); ++j) {
                for (const auto& action : actions) {
                    bool exempt = ignored.count(action) != 0;
                    for (std::size_t b = 0; b < blocks.size(); ++b) {
                        if (exempt && block_of[block[i]] == b) continue;
                        auto qi = pepa::total_conditional_rate(g, block[i],
                                                               blocks[b], action);
                        auto qj = pepa::total_conditional_rate(g, block[j],
                                                               blocks[b], action);
                        if (qi != qj) return false;
                    }
                }
            }
        }
    }
    return true;
}

/// True iff fine refines coarse: states sharing a fine block share a coarse one.
inline bool refines(const BlockOf& fine, const BlockOf& coarse) {
    for (std::size_t i = 0; i < fine.size(); ++i)
        for (std::size_t j = i + 1; j < fine.size(); ++j)
            if (fine[i] == fine[j] && coarse[i] != coarse[j]) return false;
    return true;
}

/// Unique coarsest stable partition; throws if it does not exist (it always
/// does for lumpable bisimulations, so a throw means a broken premise).
inline BlockOf coarsest_stable(const pepa::DerivationGraph& g,
                               const std::set<std::string>& ignored) {
    std::vector<BlockOf> stable;
    for (const auto& p : all_partitions(g.state_count()))
        if (is_stable(g, p, ignored)) stable.push_back(p);
    if (stable.empty()) throw std::logic_error("no stable partition (identity must be stable)");

    std::vector<BlockOf> coarsest;
    for (const auto& candidate : stable) {
        bool all_refine = true;
        for (const auto& other : stable)
            if (!refines(other, candidate)) { all_refine = false; break; }
        if (all_refine) coarsest.push_back(candidate);
    }
    if (coarsest.size() != 1)
        throw std::logic_error("coarsest stable partition is not unique: " +
                               std::to_string(coarsest.size()) + " candidates");
    return coarsest.front();
}

/// Same grouping up to block renaming.
inline bool same_partition(const BlockOf& a, const BlockOf& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j)
            if ((a[i] == a[j]) != (b[i] == b[j])) return false;
    return true;
}

}  // namespace oracle
