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

#include "ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "errors.hpp"

namespace pepa {

Generator build_generator(const DerivationGraph& g) {
    Generator q;
    q.n = g.state_count();
    q.diag.assign(q.n, Rational(0));

    std::map<std::pair<std::uint32_t, std::uint32_t>, Rational> cells;
    for (const auto& t : g.transitions) {
        if (t.rate.is_passive())
            throw PassiveRateReachableError(t.source, t.action);
        if (t.source == t.target) continue;
        cells[{t.source, t.target}] += t.rate.value();
    }
    q.off_diag.reserve(cells.size());
    for (auto& [key, rate] : cells) {
        q.diag[key.first] -= rate;
        q.off_diag.push_back({key.first, key.second, std::move(rate)});
    }
    return q;
}

RateTotal conditional_rate(const DerivationGraph& g, std::uint32_t i,
                           std::uint32_t j, const std::string& action) {
    RateTotal total;
    auto [begin, end] = g.outgoing[i];
    for (std::uint32_t k = begin; k < end; ++k) {
        const Transition& t = g.transitions[k];
        if (t.target == j && t.action == action) total.add(t.rate);
    }
    return total;
}

RateTotal total_conditional_rate(const DerivationGraph& g, std::uint32_t i,
                                 const std::vector<std::uint32_t>& targets,
                                 const std::string& action) {
    std::set<std::uint32_t> wanted(targets.begin(), targets.end());
    RateTotal total;
    auto [begin, end] = g.outgoing[i];
    for (std::uint32_t k = begin; k < end; ++k) {
        const Transition& t = g.transitions[k];
        if (t.action == action && wanted.count(t.target)) total.add(t.rate);
    }
    return total;
}

std::vector<std::vector<std::uint32_t>> strongly_connected_components(
    const Generator& q) {
    std::size_t n = q.n;
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (const auto& e : q.off_diag) adj[e.row].push_back(e.col);

    // Iterative Tarjan.
    std::vector<std::uint32_t> low(n, 0), num(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::uint32_t> stack;
    std::vector<std::vector<std::uint32_t>> components;
    std::uint32_t counter = 1;

    struct Frame {
        std::uint32_t v;
        std::size_t next_child;
    };
    for (std::uint32_t start = 0; start < n; ++start) {
        if (num[start] != 0) continue;
        std::vector<Frame> frames{{start, 0}};
        num[start] = low[start] = counter++;
        stack.push_back(start);
        on_stack[start] = true;
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.next_child < adj[f.v].size()) {
                std::uint32_t w = adj[f.v][f.next_child++];
                if (num[w] == 0) {
                    num[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], num[w]);
                }
            } else {
                if (low[f.v] == num[f.v]) {
                    std::vector<std::uint32_t> comp;
                    while (true) {
                        std::uint32_t w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp.push_back(w);
                        if (w == f.v) break;
                    }
                    std::sort(comp.begin(), comp.end());
                    components.push_back(std::move(comp));
                }
                std::uint32_t v = f.v;
                frames.pop_back();
                if (!frames.empty())
                    low[frames.back().v] = std::min(low[frames.back().v], low[v]);
            }
        }
    }
    std::sort(components.begin(), components.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return components;
}

namespace {

void require_irreducible(const Generator& q) {
    auto components = strongly_connected_components(q);
    if (components.size() <= 1) return;

    std::vector<std::uint32_t> comp_of(q.n, 0);
    for (std::uint32_t c = 0; c < components.size(); ++c)
        for (auto v : components[c]) comp_of[v] = c;
    std::vector<bool> has_exit(components.size(), false);
    for (const auto& e : q.off_diag)
        if (comp_of[e.row] != comp_of[e.col]) has_exit[comp_of[e.row]] = true;

    std::vector<std::vector<std::uint32_t>> bottoms;
    for (std::uint32_t c = 0; c < components.size(); ++c)
        if (!has_exit[c]) bottoms.push_back(components[c]);

    std::ostringstream msg;
    msg << "CTMC is not irreducible: " << components.size()
        << " strongly connected components; terminal components:";
    for (const auto& comp : bottoms) {
        msg << " {";
        for (std::size_t i = 0; i < comp.size() && i < 8; ++i) {
            if (i) msg << ", ";
            msg << comp[i];
        }
        if (comp.size() > 8) msg << ", ...";
        msg << "}";
    }
    throw NotIrreducibleError(msg.str(), std::move(bottoms));
}

double max_abs_residual(const Generator& q, const std::vector<double>& pi) {
    std::vector<double> r(q.n, 0.0);
    for (std::size_t i = 0; i < q.n; ++i) r[i] = pi[i] * to_double(q.diag[i]);
    for (const auto& e : q.off_diag) r[e.col] += pi[e.row] * to_double(e.rate);
    double worst = 0.0;
    for (double v : r) worst = std::max(worst, std::fabs(v));
    return worst;
}

std::vector<double> solve_dense(const Generator& q) {
    std::size_t n = q.n;
    // Balance equations transposed, with the last one replaced by
    // normalization: A * pi = e_n.
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) a[i][i] = to_double(q.diag[i]);
    for (const auto& e : q.off_diag) a[e.col][e.row] = to_double(e.rate);
    for (std::size_t j = 0; j < n; ++j) a[n - 1][j] = 1.0;
    a[n - 1][n] = 1.0;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        if (std::fabs(a[pivot][col]) < 1e-300)
            throw SingularSystemError("singular balance system");
        std::swap(a[col], a[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<double> pi(n, 0.0);
    for (std::size_t row = n; row-- > 0;) {
        double acc = a[row][n];
        for (std::size_t c = row + 1; c < n; ++c) acc -= a[row][c] * pi[c];
        pi[row] = acc / a[row][row];
    }
    return pi;
}

std::vector<double> solve_power(const Generator& q, const SteadyOptions& options) {
    std::size_t n = q.n;
    double max_diag = 0.0;
    for (const auto& d : q.diag) max_diag = std::max(max_diag, std::fabs(to_double(d)));
    if (max_diag == 0.0) return std::vector<double>(n, 1.0 / static_cast<double>(n));
    double uniformization = 1.1 * max_diag;

    // pi <- pi * (I + Q / uniformization) until the update is below tolerance.
    std::vector<double> pi(n, 1.0 / static_cast<double>(n)), next(n, 0.0);
    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        for (std::size_t i = 0; i < n; ++i)
            next[i] = pi[i] * (1.0 + to_double(q.diag[i]) / uniformization);
        for (const auto& e : q.off_diag)
            next[e.col] += pi[e.row] * to_double(e.rate) / uniformization;
        double total = 0.0;
        for (double v : next) total += v;
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] /= total;
            delta = std::max(delta, std::fabs(next[i] - pi[i]));
        }
        pi.swap(next);
        if (delta < options.iteration_tolerance) break;
    }
    return pi;
}

}  // namespace

SteadyState steady_state(const Generator& q, const SteadyOptions& options) {
    if (q.n == 0) throw IllFormedTermError("empty generator");
    require_irreducible(q);

    SteadyState result;
    if (q.n == 1) {
        result.probs = {1.0};
        result.residual = 0.0;
        return result;
    }
    result.probs = q.n < options.dense_threshold ? solve_dense(q)
                                                 : solve_power(q, options);

    double total = 0.0;
    for (double& p : result.probs) {
        if (p < 0.0 && p > -1e-12) p = 0.0;
        total += p;
    }
    if (!(total > 0.0))
        throw SingularSystemError("steady-state normalization failed");
    for (double& p : result.probs) p /= total;
    result.residual = max_abs_residual(q, result.probs);
    return result;
}

}  // namespace pepa
