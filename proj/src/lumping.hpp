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
#include <set>
#include <string>
#include <vector>

#include "semantics.hpp"

namespace pepa {

/// Disjoint, jointly exhaustive blocks over graph states. Canonical form:
/// members ascending, blocks ordered by smallest member.
struct Partition {
    std::vector<std::vector<std::uint32_t>> blocks;
    std::vector<std::uint32_t> block_of;

    std::size_t block_count() const { return blocks.size(); }
    bool same_block(std::uint32_t i, std::uint32_t j) const {
        return block_of[i] == block_of[j];
    }
};

Partition trivial_partition(std::size_t n);

/// Coarsest refinement of `initial` that is a lumpable bisimulation with the
/// given ignored action set: states P, Q in one block must have equal total
/// conditional rates q[., S, alpha] into every block S for every alpha, except
/// that alpha in `ignored` is exempt into the states' own block (the P, Q
/// not-in-S side condition). ignored must contain tau: {tau} computes plain
/// lumpable bisimilarity, high + tau computes the up-to-high variant.
///
/// Signature refinement: per round, each state's map
/// (action, target block) -> total rate is computed with own-block entries of
/// ignored actions deleted; blocks split by signature equality; repeat to
/// fixed point. All arithmetic is exact, so splits are never numerical noise.
/// Every invocation re-verifies stability of its result by brute force (via
/// the conditional-rate primitives) and throws InternalError on violation.
Partition coarsest_lumpable_partition(const DerivationGraph& g,
                                      const std::set<std::string>& ignored,
                                      const Partition* initial = nullptr);

/// True iff i and j share a block of the coarsest lumpable partition.
bool equivalent(const DerivationGraph& g, std::uint32_t i, std::uint32_t j,
                const std::set<std::string>& ignored);

/// Disjoint union with shared numbering; equal states of the two operands are
/// deliberately not merged (equivalence is semantic, not structural).
struct UnionGraph {
    DerivationGraph graph;
    std::uint32_t root1 = 0;
    std::uint32_t root2 = 0;
};

UnionGraph union_graph(const DerivationGraph& g1, const DerivationGraph& g2);

/// Brute-force stability check of a partition, recomputing every q[P, S, alpha]
/// from the transition relation. Throws InternalError when unstable.
void verify_stability(const DerivationGraph& g, const Partition& p,
                      const std::set<std::string>& ignored);

/// Counters for the always-on stability post-check; the test suite asserts
/// that every lumping invocation was verified.
struct LumpingStats {
    std::uint64_t invocations = 0;
    std::uint64_t verified = 0;
};

LumpingStats lumping_stats();

}  // namespace pepa
