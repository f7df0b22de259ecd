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

#include "lumping.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <sstream>

#include "ctmc.hpp"
#include "errors.hpp"

namespace pepa {
namespace {

std::atomic<std::uint64_t> g_invocations{0};
std::atomic<std::uint64_t> g_verified{0};

// Full brute-force verification is cheap at test scale but cubic-ish in the
// worst case, so it is skipped beyond this size.
constexpr std::size_t kVerifyLimit = 4096;

struct SigEntry {
    std::string action;
    std::uint32_t block;
    RateTotal total;

    friend bool operator==(const SigEntry& a, const SigEntry& b) {
        return a.block == b.block && a.action == b.action && a.total == b.total;
    }
    friend bool operator<(const SigEntry& a, const SigEntry& b) {
        if (a.action != b.action) return a.action < b.action;
        if (a.block != b.block) return a.block < b.block;
        return compare(a.total, b.total) < 0;
    }
};

using Signature = std::vector<SigEntry>;

Signature signature_of(const DerivationGraph& g, std::uint32_t state,
                       const std::vector<std::uint32_t>& block_of,
                       const std::set<std::string>& ignored) {
    std::map<std::pair<std::string, std::uint32_t>, RateTotal> cells;
    auto [begin, end] = g.outgoing[state];
    for (std::uint32_t k = begin; k < end; ++k) {
        const Transition& t = g.transitions[k];
        std::uint32_t target_block = block_of[t.target];
        if (target_block == block_of[state] && ignored.count(t.action)) continue;
        cells[{t.action, target_block}].add(t.rate);
    }
    Signature sig;
    sig.reserve(cells.size());
    for (auto& [key, total] : cells)
        sig.push_back({key.first, key.second, std::move(total)});
    return sig;
}

Partition canonicalize(std::vector<std::uint32_t> block_of, std::size_t n) {
    std::vector<std::int64_t> remap(n, -1);
    Partition p;
    p.block_of.assign(n, 0);
    for (std::uint32_t s = 0; s < n; ++s) {
        std::uint32_t b = block_of[s];
        if (remap[b] < 0) {
            remap[b] = static_cast<std::int64_t>(p.blocks.size());
            p.blocks.emplace_back();
        }
        std::uint32_t nb = static_cast<std::uint32_t>(remap[b]);
        p.block_of[s] = nb;
        p.blocks[nb].push_back(s);
    }
    return p;
}

}  // namespace

Partition trivial_partition(std::size_t n) {
    Partition p;
    p.block_of.assign(n, 0);
    p.blocks.emplace_back();
    for (std::uint32_t s = 0; s < n; ++s) p.blocks[0].push_back(s);
    return p;
}

Partition coarsest_lumpable_partition(const DerivationGraph& g,
                                      const std::set<std::string>& ignored,
                                      const Partition* initial) {
    if (!ignored.count(kTau))
        throw IllFormedTermError("the ignored action set must contain tau");
    std::size_t n = g.state_count();
    g_invocations.fetch_add(1, std::memory_order_relaxed);
    if (n == 0) {
        g_verified.fetch_add(1, std::memory_order_relaxed);
        return Partition{};
    }

    std::vector<std::uint32_t> block_of;
    std::size_t block_count;
    if (initial) {
        if (initial->block_of.size() != n)
            throw IllFormedTermError("initial partition does not cover the graph");
        block_of = initial->block_of;
        block_count = initial->block_count();
    } else {
        block_of.assign(n, 0);
        block_count = 1;
    }

    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<std::vector<std::uint32_t>> members(block_count);
        for (std::uint32_t s = 0; s < n; ++s) members[block_of[s]].push_back(s);

        std::vector<std::uint32_t> next(n, 0);
        std::uint32_t next_count = 0;
        for (const auto& block : members) {
            if (block.empty()) continue;
            std::map<Signature, std::uint32_t> split;
            for (std::uint32_t s : block) {
                Signature sig = signature_of(g, s, block_of, ignored);
                auto [it, fresh] = split.emplace(std::move(sig), 0);
                if (fresh) it->second = next_count++;
                next[s] = it->second;
            }
            if (split.size() > 1) changed = true;
        }
        block_of = std::move(next);
        block_count = next_count;
    }

    Partition result = canonicalize(std::move(block_of), n);
    if (n <= kVerifyLimit) {
        verify_stability(g, result, ignored);
        g_verified.fetch_add(1, std::memory_order_relaxed);
    }
    return result;
}

bool equivalent(const DerivationGraph& g, std::uint32_t i, std::uint32_t j,
                const std::set<std::string>& ignored) {
    if (i == j) return true;
    Partition p = coarsest_lumpable_partition(g, ignored);
    return p.same_block(i, j);
}

UnionGraph union_graph(const DerivationGraph& g1, const DerivationGraph& g2) {
    UnionGraph u;
    u.root1 = 0;
    u.root2 = static_cast<std::uint32_t>(g1.state_count());
    u.graph.states = g1.states;
    u.graph.states.insert(u.graph.states.end(), g2.states.begin(), g2.states.end());
    u.graph.transitions = g1.transitions;
    u.graph.transitions.reserve(g1.transitions.size() + g2.transitions.size());
    for (Transition t : g2.transitions) {
        t.source += u.root2;
        t.target += u.root2;
        u.graph.transitions.push_back(std::move(t));
    }
    u.graph.rebuild_index();
    return u;
}

void verify_stability(const DerivationGraph& g, const Partition& p,
                      const std::set<std::string>& ignored) {
    std::set<std::string> actions;
    for (const auto& t : g.transitions) actions.insert(t.action);

    for (const auto& block : p.blocks) {
        if (block.size() < 2) continue;
        std::uint32_t ref = block.front();
        for (std::size_t k = 1; k < block.size(); ++k) {
            std::uint32_t other = block[k];
            for (const auto& action : actions) {
                bool exempt_own = ignored.count(action) != 0;
                for (std::size_t b = 0; b < p.blocks.size(); ++b) {
                    if (exempt_own && p.block_of[ref] == b) continue;
                    RateTotal a = total_conditional_rate(g, ref, p.blocks[b], action);
                    RateTotal c = total_conditional_rate(g, other, p.blocks[b], action);
                    if (a != c) {
                        std::ostringstream msg;
                        msg << "lumpable partition is unstable: states " << ref
                            << " and " << other << " disagree on q[., block "
                            << b << ", " << action << "]: " << to_string(a)
                            << " vs " << to_string(c);
                        throw InternalError(msg.str());
                    }
                }
            }
        }
    }
}

LumpingStats lumping_stats() {
    return {g_invocations.load(std::memory_order_relaxed),
            g_verified.load(std::memory_order_relaxed)};
}

}  // namespace pepa
