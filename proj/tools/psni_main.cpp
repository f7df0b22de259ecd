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

// Command-line front end. Talks to the engine exclusively through the
// public C API; all serialization (text, JSON, DOT) happens here.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "psni/psni.h"

using nlohmann::json;

namespace {

// Exit codes: 0 success / property holds, 1 property fails,
// 2 input error, 3 resource or solver error.
constexpr int kExitHolds = 0;
constexpr int kExitFails = 1;
constexpr int kExitInputError = 2;
constexpr int kExitSolverError = 3;

int exit_for(psni_status status) {
    switch (status) {
        case PSNI_OK:
            return kExitHolds;
        case PSNI_ERR_IO:
        case PSNI_ERR_PARSE:
        case PSNI_ERR_INVALID_ARGUMENT:
        case PSNI_ERR_ILL_FORMED:
        case PSNI_ERR_UNDEFINED_CONSTANT:
        case PSNI_ERR_MIXED_RATE_SUM:
            return kExitInputError;
        default:
            return kExitSolverError;
    }
}

struct ModelDeleter { void operator()(psni_model* m) const { psni_model_free(m); } };
struct DiagsDeleter { void operator()(psni_diagnostics* d) const { psni_diagnostics_free(d); } };
struct GraphDeleter { void operator()(psni_graph* g) const { psni_graph_free(g); } };
struct GenDeleter { void operator()(psni_generator* g) const { psni_generator_free(g); } };
struct PartDeleter { void operator()(psni_partition* p) const { psni_partition_free(p); } };
struct VerdictDeleter { void operator()(psni_verdict* v) const { psni_verdict_free(v); } };
struct ReportDeleter { void operator()(psni_report* r) const { psni_report_free(r); } };

using ModelPtr = std::unique_ptr<psni_model, ModelDeleter>;
using DiagsPtr = std::unique_ptr<psni_diagnostics, DiagsDeleter>;
using GraphPtr = std::unique_ptr<psni_graph, GraphDeleter>;
using GenPtr = std::unique_ptr<psni_generator, GenDeleter>;
using PartPtr = std::unique_ptr<psni_partition, PartDeleter>;
using VerdictPtr = std::unique_ptr<psni_verdict, VerdictDeleter>;
using ReportPtr = std::unique_ptr<psni_report, ReportDeleter>;

struct Options {
    std::string input;
    std::vector<std::string> high;
    bool high_given = false;
    size_t max_states = 0;  // 0 = default / env fallback
    std::string format = "text";
    std::string method = "both";
    std::string ignored = "tau";
};

int fail(psni_status status) {
    std::cerr << "error: " << psni_last_error() << "\n";
    return exit_for(status);
}

void print_diagnostics(const psni_diagnostics* diags, bool errors_only) {
    size_t n = psni_diagnostics_count(diags);
    for (size_t i = 0; i < n; ++i) {
        psni_diag_info info;
        if (psni_diagnostics_get(diags, i, &info) != PSNI_OK) continue;
        bool is_error = info.severity == PSNI_SEVERITY_ERROR;
        if (errors_only && !is_error) continue;
        std::cerr << (is_error ? "error" : "warning") << ": line " << info.line
                  << ":" << info.column << ": " << info.message << "\n";
    }
}

json diagnostics_to_json(const psni_diagnostics* diags) {
    json out = json::array();
    size_t n = psni_diagnostics_count(diags);
    for (size_t i = 0; i < n; ++i) {
        psni_diag_info info;
        if (psni_diagnostics_get(diags, i, &info) != PSNI_OK) continue;
        out.push_back({{"line", info.line},
                       {"column", info.column},
                       {"severity", info.severity == PSNI_SEVERITY_ERROR
                                        ? "error"
                                        : "warning"},
                       {"message", info.message}});
    }
    return out;
}

/// Load + parse + apply --high override; prints diagnostics to stderr.
/// Returns nullptr and sets exit_code on failure.
ModelPtr load_model(const Options& opt, int& exit_code) {
    psni_model* raw_model = nullptr;
    psni_diagnostics* raw_diags = nullptr;
    psni_status status = psni_parse_file(opt.input.c_str(), &raw_model, &raw_diags);
    ModelPtr model(raw_model);
    DiagsPtr diags(raw_diags);
    if (status != PSNI_OK) {
        if (diags) print_diagnostics(diags.get(), false);
        else std::cerr << "error: " << psni_last_error() << "\n";
        exit_code = exit_for(status);
        return nullptr;
    }
    if (opt.high_given) {
        std::vector<const char*> actions;
        for (const auto& a : opt.high) actions.push_back(a.c_str());
        status = psni_model_set_high(model.get(), actions.data(), actions.size());
        if (status != PSNI_OK) {
            exit_code = fail(status);
            return nullptr;
        }
        psni_diagnostics* raw_warn = nullptr;
        if (psni_model_warnings(model.get(), &raw_warn) == PSNI_OK) {
            DiagsPtr warn(raw_warn);
            print_diagnostics(warn.get(), false);
        }
    } else if (diags) {
        print_diagnostics(diags.get(), false);
    }
    return model;
}

GraphPtr derive(const psni_model* model, const Options& opt, int& exit_code) {
    psni_graph* raw = nullptr;
    psni_status status = psni_graph_derive(model, opt.max_states, &raw);
    if (status != PSNI_OK) {
        exit_code = fail(status);
        return nullptr;
    }
    return GraphPtr(raw);
}

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

json transition_json(const psni_transition_info& t) {
    return {{"source", t.source},       {"target", t.target},
            {"action", t.action},       {"rate", t.rate},
            {"rateValue", t.rate_value}, {"passive", t.is_passive != 0},
            {"multiplicity", t.multiplicity}};
}

/* ------------------------------------------------------------ subcommands */

int run_parse(const Options& opt) {
    psni_model* raw_model = nullptr;
    psni_diagnostics* raw_diags = nullptr;
    psni_status status = psni_parse_file(opt.input.c_str(), &raw_model, &raw_diags);
    ModelPtr model(raw_model);
    DiagsPtr diags(raw_diags);
    if (opt.format != "json") print_diagnostics(diags.get(), false);
    if (status != PSNI_OK) {
        if (opt.format == "json") {
            json out = {{"ok", false},
                        {"model", nullptr},
                        {"diagnostics", diagnostics_to_json(diags.get())}};
            std::cout << out.dump(2) << "\n";
        } else if (!diags) {
            std::cerr << "error: " << psni_last_error() << "\n";
        }
        return exit_for(status);
    }
    if (opt.high_given) {
        std::vector<const char*> actions;
        for (const auto& a : opt.high) actions.push_back(a.c_str());
        status = psni_model_set_high(model.get(), actions.data(), actions.size());
        if (status != PSNI_OK) return fail(status);
    }
    char* text = nullptr;
    status = psni_model_render(model.get(), &text);
    if (status != PSNI_OK) return fail(status);
    std::string canonical(text);
    psni_string_free(text);
    if (opt.format == "json") {
        json out = {{"ok", true},
                    {"model", canonical},
                    {"diagnostics", diagnostics_to_json(diags.get())}};
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << canonical;
    }
    return kExitHolds;
}

int run_graph(const Options& opt) {
    int exit_code = 0;
    ModelPtr model = load_model(opt, exit_code);
    if (!model) return exit_code;
    GraphPtr graph = derive(model.get(), opt, exit_code);
    if (!graph) return exit_code;

    size_t states = psni_graph_state_count(graph.get());
    size_t transitions = psni_graph_transition_count(graph.get());

    if (opt.format == "dot") {
        std::cout << "digraph model {\n  rankdir=LR;\n  node [shape=ellipse];\n";
        for (size_t s = 0; s < states; ++s)
            std::cout << "  s" << s << " [label=\""
                      << dot_escape(psni_graph_state_label(graph.get(), s))
                      << "\"];\n";
        for (size_t i = 0; i < transitions; ++i) {
            psni_transition_info t;
            psni_graph_transition(graph.get(), i, &t);
            std::cout << "  s" << t.source << " -> s" << t.target
                      << " [label=\"(" << dot_escape(t.action) << ", "
                      << dot_escape(t.rate) << ")×" << t.multiplicity
                      << "\"];\n";
        }
        std::cout << "}\n";
    } else if (opt.format == "json") {
        json out;
        out["root"] = psni_graph_root(graph.get());
        out["states"] = json::array();
        for (size_t s = 0; s < states; ++s)
            out["states"].push_back(
                {{"id", s}, {"label", psni_graph_state_label(graph.get(), s)}});
        out["transitions"] = json::array();
        for (size_t i = 0; i < transitions; ++i) {
            psni_transition_info t;
            psni_graph_transition(graph.get(), i, &t);
            out["transitions"].push_back(transition_json(t));
        }
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "states: " << states << " (root 0)\n";
        for (size_t s = 0; s < states; ++s)
            std::cout << "  " << s << ": " << psni_graph_state_label(graph.get(), s)
                      << "\n";
        std::cout << "transitions: " << transitions << "\n";
        for (size_t i = 0; i < transitions; ++i) {
            psni_transition_info t;
            psni_graph_transition(graph.get(), i, &t);
            std::cout << "  " << t.source << " --(" << t.action << ", " << t.rate
                      << ")x" << t.multiplicity << "--> " << t.target << "\n";
        }
    }
    return kExitHolds;
}

int run_ctmc(const Options& opt) {
    int exit_code = 0;
    ModelPtr model = load_model(opt, exit_code);
    if (!model) return exit_code;
    GraphPtr graph = derive(model.get(), opt, exit_code);
    if (!graph) return exit_code;

    psni_generator* raw = nullptr;
    psni_status status = psni_generator_build(graph.get(), &raw);
    if (status != PSNI_OK) return fail(status);
    GenPtr gen(raw);

    size_t dim = psni_generator_dim(gen.get());
    size_t entries = psni_generator_entry_count(gen.get());
    if (opt.format == "json") {
        json out;
        out["dim"] = dim;
        out["entries"] = json::array();
        for (size_t i = 0; i < entries; ++i) {
            psni_generator_entry_info e;
            psni_generator_entry(gen.get(), i, &e);
            out["entries"].push_back({{"row", e.row},
                                      {"col", e.col},
                                      {"rate", e.rate},
                                      {"rateValue", e.value}});
        }
        out["diagonal"] = json::array();
        for (size_t s = 0; s < dim; ++s) {
            const char* rate = nullptr;
            double value = 0.0;
            psni_generator_diagonal(gen.get(), s, &rate, &value);
            out["diagonal"].push_back({{"rate", rate}, {"rateValue", value}});
        }
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "generator: " << dim << " states, " << entries
                  << " off-diagonal entries\n";
        for (size_t i = 0; i < entries; ++i) {
            psni_generator_entry_info e;
            psni_generator_entry(gen.get(), i, &e);
            std::cout << "  q[" << e.row << "," << e.col << "] = " << e.rate << "\n";
        }
        for (size_t s = 0; s < dim; ++s) {
            const char* rate = nullptr;
            double value = 0.0;
            psni_generator_diagonal(gen.get(), s, &rate, &value);
            std::cout << "  q[" << s << "," << s << "] = " << rate << "\n";
        }
    }
    return kExitHolds;
}

int run_steady(const Options& opt) {
    int exit_code = 0;
    ModelPtr model = load_model(opt, exit_code);
    if (!model) return exit_code;
    GraphPtr graph = derive(model.get(), opt, exit_code);
    if (!graph) return exit_code;

    psni_generator* raw = nullptr;
    psni_status status = psni_generator_build(graph.get(), &raw);
    if (status != PSNI_OK) return fail(status);
    GenPtr gen(raw);

    size_t dim = psni_generator_dim(gen.get());
    std::vector<double> probs(dim, 0.0);
    status = psni_steady_state(gen.get(), probs.data());
    if (status != PSNI_OK) return fail(status);

    if (opt.format == "json") {
        json out;
        out["probs"] = probs;
        out["labels"] = json::array();
        for (size_t s = 0; s < dim; ++s)
            out["labels"].push_back(psni_graph_state_label(graph.get(), s));
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "steady state (" << dim << " states):\n";
        for (size_t s = 0; s < dim; ++s) {
            std::printf("  pi[%zu] = %.12g  %s\n", s, probs[s],
                        psni_graph_state_label(graph.get(), s));
        }
    }
    return kExitHolds;
}

int run_lump(const Options& opt) {
    int exit_code = 0;
    ModelPtr model = load_model(opt, exit_code);
    if (!model) return exit_code;
    GraphPtr graph = derive(model.get(), opt, exit_code);
    if (!graph) return exit_code;

    psni_ignore_mode mode;
    if (opt.ignored == "tau") {
        mode = PSNI_IGNORE_TAU;
    } else if (opt.ignored == "high,tau" || opt.ignored == "tau,high") {
        mode = PSNI_IGNORE_HIGH_AND_TAU;
    } else {
        std::cerr << "error: --ignored must be 'tau' or 'high,tau'\n";
        return kExitInputError;
    }

    psni_partition* raw = nullptr;
    psni_status status = psni_lump(graph.get(), mode, &raw);
    if (status != PSNI_OK) return fail(status);
    PartPtr part(raw);

    size_t blocks = psni_partition_block_count(part.get());
    if (opt.format == "json") {
        json out;
        out["ignored"] = opt.ignored;
        out["blockCount"] = blocks;
        out["blocks"] = json::array();
        for (size_t b = 0; b < blocks; ++b) {
            json members = json::array();
            size_t size = psni_partition_block_size(part.get(), b);
            for (size_t i = 0; i < size; ++i) {
                size_t state = 0;
                psni_partition_block_member(part.get(), b, i, &state);
                members.push_back(state);
            }
            out["blocks"].push_back(members);
        }
        out["labels"] = json::array();
        for (size_t s = 0; s < psni_graph_state_count(graph.get()); ++s)
            out["labels"].push_back(psni_graph_state_label(graph.get(), s));
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "partition (ignored = " << opt.ignored << "): " << blocks
                  << " blocks over " << psni_graph_state_count(graph.get())
                  << " states\n";
        for (size_t b = 0; b < blocks; ++b) {
            std::cout << "  block " << b << ": {";
            size_t size = psni_partition_block_size(part.get(), b);
            for (size_t i = 0; i < size; ++i) {
                size_t state = 0;
                psni_partition_block_member(part.get(), b, i, &state);
                std::cout << (i ? ", " : "") << state;
            }
            size_t first = 0;
            psni_partition_block_member(part.get(), b, 0, &first);
            std::cout << "}  " << psni_graph_state_label(graph.get(), first) << "\n";
        }
    }
    return kExitHolds;
}

int run_check(const Options& opt) {
    int exit_code = 0;
    ModelPtr model = load_model(opt, exit_code);
    if (!model) return exit_code;

    psni_method method;
    if (opt.method == "bisim") method = PSNI_METHOD_BISIM;
    else if (opt.method == "unwinding") method = PSNI_METHOD_UNWINDING;
    else if (opt.method == "both") method = PSNI_METHOD_BOTH;
    else {
        std::cerr << "error: --method must be bisim, unwinding, or both\n";
        return kExitInputError;
    }

    psni_verdict* raw = nullptr;
    psni_status status = psni_check(model.get(), method, opt.max_states, &raw);
    if (status != PSNI_OK) return fail(status);
    VerdictPtr verdict(raw);

    bool holds = psni_verdict_holds(verdict.get()) != 0;
    size_t blocks = psni_verdict_block_count(verdict.get());
    const char* method_name = opt.method.c_str();

    if (opt.format == "json") {
        json out;
        out["holds"] = holds;
        out["method"] = method_name;
        out["states"] = psni_verdict_state_count(verdict.get());
        json sizes = json::array();
        for (size_t b = 0; b < blocks; ++b)
            sizes.push_back(psni_verdict_block_size(verdict.get(), b));
        out["blocks"] = {{"count", blocks}, {"sizes", sizes}};
        if (psni_verdict_has_witness(verdict.get())) {
            psni_witness_info w;
            psni_verdict_witness(verdict.get(), &w);
            out["witness"] = {{"source", w.source},
                              {"target", w.target},
                              {"action", w.action},
                              {"rate", w.rate},
                              {"sourceLabel", w.source_label},
                              {"targetLabel", w.target_label},
                              {"rootPair", w.is_root_pair != 0}};
        } else {
            out["witness"] = nullptr;
        }
        json notes = json::array();
        for (size_t i = 0; i < psni_verdict_note_count(verdict.get()); ++i)
            notes.push_back(psni_verdict_note(verdict.get(), i));
        out["diagnostics"] = notes;
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "PSNI: " << (holds ? "HOLDS" : "FAIL") << "  (method: "
                  << method_name << ")\n";
        if (psni_verdict_has_witness(verdict.get())) {
            psni_witness_info w;
            psni_verdict_witness(verdict.get(), &w);
            if (w.is_root_pair)
                std::cout << "witness: root pair " << w.source_label << " vs "
                          << w.target_label << "\n";
            else
                std::cout << "witness: " << w.source_label << " --(" << w.action
                          << ", " << w.rate << ")--> " << w.target_label << "\n";
        }
        std::cout << "states: " << psni_verdict_state_count(verdict.get())
                  << ", partition blocks: " << blocks << "\n";
        for (size_t i = 0; i < psni_verdict_note_count(verdict.get()); ++i)
            std::cout << "  " << psni_verdict_note(verdict.get(), i) << "\n";
    }
    return holds ? kExitHolds : kExitFails;
}

int run_report(const Options& opt) {
    int exit_code = 0;
    ModelPtr model = load_model(opt, exit_code);
    if (!model) return exit_code;

    psni_report* raw = nullptr;
    psni_status status = psni_report_build(model.get(), opt.max_states, &raw);
    if (status != PSNI_OK) return fail(status);
    ReportPtr report(raw);

    size_t hidden = psni_report_hidden_count(report.get());
    size_t restricted = psni_report_restricted_count(report.get());
    size_t classes = psni_report_class_count(report.get());

    if (opt.format == "json") {
        json out;
        out["hidden"] = json::array();
        for (size_t i = 0; i < hidden; ++i)
            out["hidden"].push_back(
                {{"label", psni_report_hidden_label(report.get(), i)},
                 {"prob", psni_report_hidden_prob(report.get(), i)}});
        out["restricted"] = json::array();
        for (size_t i = 0; i < restricted; ++i)
            out["restricted"].push_back(
                {{"label", psni_report_restricted_label(report.get(), i)},
                 {"prob", psni_report_restricted_prob(report.get(), i)}});
        out["classes"] = json::array();
        for (size_t i = 0; i < classes; ++i)
            out["classes"].push_back(
                {{"label", psni_report_class_label(report.get(), i)},
                 {"hiddenProb", psni_report_class_hidden_prob(report.get(), i)},
                 {"restrictedProb",
                  psni_report_class_restricted_prob(report.get(), i)},
                 {"agree", psni_report_class_agree(report.get(), i) != 0}});
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "hidden view (high relabelled to tau): " << hidden
                  << " states\n";
        for (size_t i = 0; i < hidden; ++i)
            std::printf("  pi[%zu] = %.12g  %s\n", i,
                        psni_report_hidden_prob(report.get(), i),
                        psni_report_hidden_label(report.get(), i));
        std::cout << "restricted view (high removed): " << restricted
                  << " states\n";
        for (size_t i = 0; i < restricted; ++i)
            std::printf("  pi[%zu] = %.12g  %s\n", i,
                        psni_report_restricted_prob(report.get(), i),
                        psni_report_restricted_label(report.get(), i));
        std::cout << "equivalence classes across both views:\n";
        for (size_t i = 0; i < classes; ++i)
            std::printf("  %-30s hidden %.12g  restricted %.12g  %s\n",
                        psni_report_class_label(report.get(), i),
                        psni_report_class_hidden_prob(report.get(), i),
                        psni_report_class_restricted_prob(report.get(), i),
                        psni_report_class_agree(report.get(), i) ? "agree"
                                                                 : "DIFFER");
    }
    return kExitHolds;
}

size_t max_states_from_env(int& exit_code) {
    const char* env = std::getenv("PSNI_MAX_STATES");
    if (!env || !*env) return 0;
    char* end = nullptr;
    unsigned long long value = std::strtoull(env, &end, 10);
    if (*end != '\0' || value == 0) {
        std::cerr << "error: PSNI_MAX_STATES must be a positive integer\n";
        exit_code = kExitInputError;
        return 0;
    }
    return static_cast<size_t>(value);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PEPA noninterference model checker"};
    app.set_version_flag("--version", std::string(psni_version()));
    app.require_subcommand(1);

    Options opt;
    bool json_flag = false;

    auto add_common = [&](CLI::App* sub, bool with_dot) {
        sub->add_option("input", opt.input, ".pepa model file")->required();
        sub->add_option("--high", opt.high,
                        "override the high action set (comma separated)")
            ->delimiter(',')
            ->each([&](const std::string&) { opt.high_given = true; });
        sub->add_option("--max-states", opt.max_states,
                        "state space cap (default 100000, or PSNI_MAX_STATES)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--format", opt.format, "output format")
            ->check(CLI::IsMember(with_dot
                                      ? std::vector<std::string>{"text", "json", "dot"}
                                      : std::vector<std::string>{"text", "json"}));
        sub->add_flag("--json", json_flag, "shorthand for --format json");
    };

    CLI::App* parse_cmd = app.add_subcommand("parse", "validate and echo the canonical model");
    add_common(parse_cmd, false);
    CLI::App* graph_cmd = app.add_subcommand("graph", "derive the labelled transition system");
    add_common(graph_cmd, true);
    CLI::App* ctmc_cmd = app.add_subcommand("ctmc", "emit the infinitesimal generator");
    add_common(ctmc_cmd, false);
    CLI::App* steady_cmd = app.add_subcommand("steady", "solve the steady-state distribution");
    add_common(steady_cmd, false);
    CLI::App* lump_cmd = app.add_subcommand("lump", "coarsest lumpable partition");
    add_common(lump_cmd, false);
    lump_cmd->add_option("--ignored", opt.ignored, "'tau' or 'high,tau'");
    CLI::App* check_cmd = app.add_subcommand("check", "decide persistent stochastic noninterference");
    add_common(check_cmd, false);
    check_cmd->add_option("--method", opt.method, "bisim, unwinding, or both");
    CLI::App* report_cmd = app.add_subcommand("report", "steady-state comparison of the low views");
    add_common(report_cmd, false);

    CLI11_PARSE(app, argc, argv);

    if (json_flag) opt.format = "json";
    if (opt.max_states == 0) {
        int exit_code = 0;
        opt.max_states = max_states_from_env(exit_code);
        if (exit_code != 0) return exit_code;
    }

    if (parse_cmd->parsed()) return run_parse(opt);
    if (graph_cmd->parsed()) return run_graph(opt);
    if (ctmc_cmd->parsed()) return run_ctmc(opt);
    if (steady_cmd->parsed()) return run_steady(opt);
    if (lump_cmd->parsed()) return run_lump(opt);
    if (check_cmd->parsed()) return run_check(opt);
    if (report_cmd->parsed()) return run_report(opt);
    return kExitInputError;
}
