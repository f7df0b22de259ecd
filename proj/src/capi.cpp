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

#include "psni/psni.h"

#include <cstring>
#include <fstream>
#include <sstream>

#include "ctmc.hpp"
#include "errors.hpp"
#include "lumping.hpp"
#include "parser.hpp"
#include "security.hpp"
#include "semantics.hpp"

namespace {

thread_local std::string g_last_error = "no error";

void set_error(std::string message) { g_last_error = std::move(message); }

/// Runs f, translating exceptions into status codes and the thread-local
/// error message.
template <typename F>
psni_status guarded(F&& f) noexcept {
    try {
        return f();
    } catch (const pepa::UndefinedConstantError& e) {
        set_error(e.what());
        return PSNI_ERR_UNDEFINED_CONSTANT;
    } catch (const pepa::MixedRateSumError& e) {
        set_error(e.what());
        return PSNI_ERR_MIXED_RATE_SUM;
    } catch (const pepa::StateSpaceExceededError& e) {
        set_error(e.what());
        return PSNI_ERR_STATE_SPACE_EXCEEDED;
    } catch (const pepa::PassiveRateReachableError& e) {
        set_error(e.what());
        return PSNI_ERR_PASSIVE_RATE_REACHABLE;
    } catch (const pepa::NotIrreducibleError& e) {
        set_error(e.what());
        return PSNI_ERR_NOT_IRREDUCIBLE;
    } catch (const pepa::SingularSystemError& e) {
        set_error(e.what());
        return PSNI_ERR_SINGULAR_SYSTEM;
    } catch (const pepa::UnguardedRecursionError& e) {
        set_error(e.what());
        return PSNI_ERR_ILL_FORMED;
    } catch (const pepa::IllFormedTermError& e) {
        set_error(e.what());
        return PSNI_ERR_ILL_FORMED;
    } catch (const pepa::InternalError& e) {
        set_error(e.what());
        return PSNI_ERR_INTERNAL;
    } catch (const std::exception& e) {
        set_error(e.what());
        return PSNI_ERR_INTERNAL;
    } catch (...) {
        set_error("unknown error");
        return PSNI_ERR_INTERNAL;
    }
}

psni_status invalid(const char* message) {
    set_error(message);
    return PSNI_ERR_INVALID_ARGUMENT;
}

char* copy_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

std::size_t effective_max_states(size_t max_states) {
    return max_states == PSNI_DEFAULT_MAX_STATES ? pepa::kDefaultMaxStates
                                                 : max_states;
}

}  // namespace

struct psni_model {
    pepa::ModelEnv env;
};

struct psni_diagnostics {
    std::vector<pepa::ParseDiagnostic> items;
};

struct psni_graph {
    pepa::DerivationGraph graph;
    std::set<std::string> high;
    std::vector<std::string> labels;     // one per state
    std::vector<std::string> rates;      // one per transition

    explicit psni_graph(pepa::DerivationGraph g, std::set<std::string> h)
        : graph(std::move(g)), high(std::move(h)) {
        labels.reserve(graph.state_count());
        for (const auto& s : graph.states) labels.push_back(pepa::render_term(s));
        rates.reserve(graph.transitions.size());
        for (const auto& t : graph.transitions) rates.push_back(pepa::to_string(t.rate));
    }
};

struct psni_generator {
    pepa::Generator gen;
    std::vector<std::string> entry_rates;
    std::vector<std::string> diag_rates;

    explicit psni_generator(pepa::Generator g) : gen(std::move(g)) {
        entry_rates.reserve(gen.off_diag.size());
        for (const auto& e : gen.off_diag) entry_rates.push_back(pepa::to_string(e.rate));
        diag_rates.reserve(gen.diag.size());
        for (const auto& d : gen.diag) diag_rates.push_back(pepa::to_string(d));
    }
};

struct psni_partition {
    pepa::Partition part;
};

struct psni_verdict {
    pepa::PsniVerdict v;
};

struct psni_report {
    pepa::LowViewReport r;
};

extern "C" {

const char* psni_version(void) { return "0.1.0"; }

const char* psni_last_error(void) { return g_last_error.c_str(); }

void psni_string_free(char* s) { delete[] s; }

/* ----------------------------------------------------------------- parsing */

static psni_status parse_common(const std::string& source, psni_model** model,
                                psni_diagnostics** diags) {
    if (model) *model = nullptr;
    if (diags) *diags = nullptr;
    pepa::ParseResult result = pepa::parse_model(source);
    if (diags) *diags = new psni_diagnostics{result.diagnostics};
    if (!result.ok()) {
        std::string message = "parse failed";
        for (const auto& d : result.diagnostics) {
            if (d.severity == pepa::ParseDiagnostic::Severity::Error) {
                message = "line " + std::to_string(d.line) + ":" +
                          std::to_string(d.column) + ": " + d.message;
                break;
            }
        }
        set_error(std::move(message));
        return PSNI_ERR_PARSE;
    }
    if (model) *model = new psni_model{std::move(*result.env)};
    return PSNI_OK;
}

psni_status psni_parse_string(const char* source, psni_model** model,
                              psni_diagnostics** diags) {
    if (!source) return invalid("source must not be NULL");
    return guarded([&] { return parse_common(source, model, diags); });
}

psni_status psni_parse_file(const char* path, psni_model** model,
                            psni_diagnostics** diags) {
    if (!path) return invalid("path must not be NULL");
    return guarded([&]() -> psni_status {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            set_error(std::string("cannot open '") + path + "'");
            if (model) *model = nullptr;
            if (diags) *diags = nullptr;
            return PSNI_ERR_IO;
        }
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return parse_common(buffer.str(), model, diags);
    });
}

void psni_model_free(psni_model* model) { delete model; }

void psni_diagnostics_free(psni_diagnostics* diags) { delete diags; }

size_t psni_diagnostics_count(const psni_diagnostics* diags) {
    return diags ? diags->items.size() : 0;
}

psni_status psni_diagnostics_get(const psni_diagnostics* diags, size_t index,
                                 psni_diag_info* out) {
    if (!diags || !out) return invalid("NULL argument");
    if (index >= diags->items.size()) return invalid("diagnostic index out of range");
    const auto& d = diags->items[index];
    out->line = d.line;
    out->column = d.column;
    out->severity = d.severity == pepa::ParseDiagnostic::Severity::Error
                        ? PSNI_SEVERITY_ERROR
                        : PSNI_SEVERITY_WARNING;
    out->message = d.message.c_str();
    return PSNI_OK;
}

psni_status psni_model_render(const psni_model* model, char** text) {
    if (!model || !text) return invalid("NULL argument");
    *text = nullptr;
    return guarded([&] {
        *text = copy_string(pepa::render_model(model->env));
        return PSNI_OK;
    });
}

psni_status psni_model_set_high(psni_model* model, const char* const* actions,
                                size_t count) {
    if (!model || (count > 0 && !actions)) return invalid("NULL argument");
    return guarded([&]() -> psni_status {
        std::set<std::string> high;
        for (size_t i = 0; i < count; ++i) {
            if (!actions[i]) return invalid("NULL action name");
            std::string a = actions[i];
            if (pepa::is_tau(a)) {
                set_error("'tau' cannot be a high action");
                return PSNI_ERR_ILL_FORMED;
            }
            if (a.empty()) {
                set_error("empty action name");
                return PSNI_ERR_ILL_FORMED;
            }
            high.insert(std::move(a));
        }
        model->env.high = std::move(high);
        return PSNI_OK;
    });
}

size_t psni_model_high_count(const psni_model* model) {
    return model ? model->env.high.size() : 0;
}

const char* psni_model_high_at(const psni_model* model, size_t index) {
    if (!model || index >= model->env.high.size()) return nullptr;
    auto it = model->env.high.begin();
    std::advance(it, index);
    return it->c_str();
}

psni_status psni_model_warnings(const psni_model* model,
                                psni_diagnostics** diags) {
    if (!model || !diags) return invalid("NULL argument");
    *diags = nullptr;
    return guarded([&] {
        *diags = new psni_diagnostics{pepa::high_usage_warnings(model->env)};
        return PSNI_OK;
    });
}

/* ------------------------------------------------------------------ graphs */

psni_status psni_graph_derive(const psni_model* model, size_t max_states,
                              psni_graph** graph) {
    if (!model || !graph) return invalid("NULL argument");
    *graph = nullptr;
    return guarded([&] {
        pepa::DerivationGraph g = pepa::derive_graph(
            model->env, model->env.system, effective_max_states(max_states));
        *graph = new psni_graph(std::move(g), model->env.high);
        return PSNI_OK;
    });
}

void psni_graph_free(psni_graph* graph) { delete graph; }

size_t psni_graph_state_count(const psni_graph* graph) {
    return graph ? graph->graph.state_count() : 0;
}

size_t psni_graph_root(const psni_graph* graph) {
    (void)graph;
    return pepa::DerivationGraph::kRoot;
}

const char* psni_graph_state_label(const psni_graph* graph, size_t state) {
    if (!graph || state >= graph->labels.size()) return nullptr;
    return graph->labels[state].c_str();
}

size_t psni_graph_transition_count(const psni_graph* graph) {
    return graph ? graph->graph.transitions.size() : 0;
}

psni_status psni_graph_transition(const psni_graph* graph, size_t index,
                                  psni_transition_info* out) {
    if (!graph || !out) return invalid("NULL argument");
    if (index >= graph->graph.transitions.size())
        return invalid("transition index out of range");
    const pepa::Transition& t = graph->graph.transitions[index];
    out->source = t.source;
    out->target = t.target;
    out->action = t.action.c_str();
    out->rate = graph->rates[index].c_str();
    out->rate_value = pepa::to_double(t.rate);
    out->is_passive = t.rate.is_passive() ? 1 : 0;
    out->multiplicity = t.multiplicity;
    return PSNI_OK;
}

psni_status psni_graph_restrict_high(const psni_graph* graph, psni_graph** out) {
    if (!graph || !out) return invalid("NULL argument");
    *out = nullptr;
    return guarded([&] {
        pepa::RestrictedGraph r = pepa::restrict_high(graph->graph, graph->high);
        *out = new psni_graph(std::move(r.graph), graph->high);
        return PSNI_OK;
    });
}

psni_status psni_graph_hide_high(const psni_graph* graph, psni_graph** out) {
    if (!graph || !out) return invalid("NULL argument");
    *out = nullptr;
    return guarded([&] {
        pepa::DerivationGraph h = pepa::hide_high(graph->graph, graph->high);
        *out = new psni_graph(std::move(h), graph->high);
        return PSNI_OK;
    });
}

/* -------------------------------------------------------------------- CTMC */

psni_status psni_generator_build(const psni_graph* graph,
                                 psni_generator** generator) {
    if (!graph || !generator) return invalid("NULL argument");
    *generator = nullptr;
    return guarded([&] {
        *generator = new psni_generator(pepa::build_generator(graph->graph));
        return PSNI_OK;
    });
}

void psni_generator_free(psni_generator* generator) { delete generator; }

size_t psni_generator_dim(const psni_generator* generator) {
    return generator ? generator->gen.n : 0;
}

size_t psni_generator_entry_count(const psni_generator* generator) {
    return generator ? generator->gen.off_diag.size() : 0;
}

psni_status psni_generator_entry(const psni_generator* generator, size_t index,
                                 psni_generator_entry_info* out) {
    if (!generator || !out) return invalid("NULL argument");
    if (index >= generator->gen.off_diag.size())
        return invalid("entry index out of range");
    const auto& e = generator->gen.off_diag[index];
    out->row = e.row;
    out->col = e.col;
    out->rate = generator->entry_rates[index].c_str();
    out->value = pepa::to_double(e.rate);
    return PSNI_OK;
}

psni_status psni_generator_diagonal(const psni_generator* generator,
                                    size_t state, const char** rate,
                                    double* value) {
    if (!generator) return invalid("NULL argument");
    if (state >= generator->gen.n) return invalid("state index out of range");
    if (rate) *rate = generator->diag_rates[state].c_str();
    if (value) *value = pepa::to_double(generator->gen.diag[state]);
    return PSNI_OK;
}

psni_status psni_steady_state(const psni_generator* generator, double* probs) {
    if (!generator || !probs) return invalid("NULL argument");
    return guarded([&] {
        pepa::SteadyState s = pepa::steady_state(generator->gen);
        std::copy(s.probs.begin(), s.probs.end(), probs);
        return PSNI_OK;
    });
}

/* ----------------------------------------------------------------- lumping */

psni_status psni_lump(const psni_graph* graph, psni_ignore_mode mode,
                      psni_partition** partition) {
    if (!graph || !partition) return invalid("NULL argument");
    *partition = nullptr;
    return guarded([&] {
        std::set<std::string> ignored{pepa::kTau};
        if (mode == PSNI_IGNORE_HIGH_AND_TAU)
            ignored.insert(graph->high.begin(), graph->high.end());
        *partition = new psni_partition{
            pepa::coarsest_lumpable_partition(graph->graph, ignored)};
        return PSNI_OK;
    });
}

void psni_partition_free(psni_partition* partition) { delete partition; }

size_t psni_partition_block_count(const psni_partition* partition) {
    return partition ? partition->part.block_count() : 0;
}

size_t psni_partition_block_of(const psni_partition* partition, size_t state) {
    if (!partition || state >= partition->part.block_of.size()) return SIZE_MAX;
    return partition->part.block_of[state];
}

size_t psni_partition_block_size(const psni_partition* partition, size_t block) {
    if (!partition || block >= partition->part.blocks.size()) return 0;
    return partition->part.blocks[block].size();
}

psni_status psni_partition_block_member(const psni_partition* partition,
                                        size_t block, size_t index,
                                        size_t* state) {
    if (!partition || !state) return invalid("NULL argument");
    if (block >= partition->part.blocks.size()) return invalid("block out of range");
    if (index >= partition->part.blocks[block].size())
        return invalid("member index out of range");
    *state = partition->part.blocks[block][index];
    return PSNI_OK;
}

/* ---------------------------------------------------------------- security */

psni_status psni_check(const psni_model* model, psni_method method,
                       size_t max_states, psni_verdict** verdict) {
    if (!model || !verdict) return invalid("NULL argument");
    *verdict = nullptr;
    pepa::CheckMethod m;
    switch (method) {
        case PSNI_METHOD_BISIM: m = pepa::CheckMethod::Bisim; break;
        case PSNI_METHOD_UNWINDING: m = pepa::CheckMethod::Unwinding; break;
        case PSNI_METHOD_BOTH: m = pepa::CheckMethod::Both; break;
        default: return invalid("bad method");
    }
    return guarded([&] {
        *verdict = new psni_verdict{
            pepa::check_psni(model->env, m, effective_max_states(max_states))};
        return PSNI_OK;
    });
}

void psni_verdict_free(psni_verdict* verdict) { delete verdict; }

int psni_verdict_holds(const psni_verdict* verdict) {
    return verdict && verdict->v.holds ? 1 : 0;
}

psni_method psni_verdict_method(const psni_verdict* verdict) {
    if (!verdict) return PSNI_METHOD_BOTH;
    switch (verdict->v.method) {
        case pepa::CheckMethod::Bisim: return PSNI_METHOD_BISIM;
        case pepa::CheckMethod::Unwinding: return PSNI_METHOD_UNWINDING;
        case pepa::CheckMethod::Both: return PSNI_METHOD_BOTH;
    }
    return PSNI_METHOD_BOTH;
}

size_t psni_verdict_state_count(const psni_verdict* verdict) {
    return verdict ? verdict->v.state_count : 0;
}

size_t psni_verdict_block_count(const psni_verdict* verdict) {
    return verdict ? verdict->v.block_sizes.size() : 0;
}

size_t psni_verdict_block_size(const psni_verdict* verdict, size_t block) {
    if (!verdict || block >= verdict->v.block_sizes.size()) return 0;
    return verdict->v.block_sizes[block];
}

int psni_verdict_has_witness(const psni_verdict* verdict) {
    return verdict && verdict->v.witness ? 1 : 0;
}

psni_status psni_verdict_witness(const psni_verdict* verdict,
                                 psni_witness_info* out) {
    if (!verdict || !out) return invalid("NULL argument");
    if (!verdict->v.witness) return invalid("verdict has no witness");
    const pepa::Witness& w = *verdict->v.witness;
    out->source = w.source;
    out->target = w.target;
    out->action = w.action.c_str();
    out->rate = w.rate.c_str();
    out->source_label = w.source_label.c_str();
    out->target_label = w.target_label.c_str();
    out->is_root_pair = w.root_pair ? 1 : 0;
    return PSNI_OK;
}

size_t psni_verdict_note_count(const psni_verdict* verdict) {
    return verdict ? verdict->v.notes.size() : 0;
}

const char* psni_verdict_note(const psni_verdict* verdict, size_t index) {
    if (!verdict || index >= verdict->v.notes.size()) return nullptr;
    return verdict->v.notes[index].c_str();
}

/* ------------------------------------------------------------------ report */

psni_status psni_report_build(const psni_model* model, size_t max_states,
                              psni_report** report) {
    if (!model || !report) return invalid("NULL argument");
    *report = nullptr;
    return guarded([&] {
        *report = new psni_report{
            pepa::low_view_report(model->env, effective_max_states(max_states))};
        return PSNI_OK;
    });
}

void psni_report_free(psni_report* report) { delete report; }

size_t psni_report_hidden_count(const psni_report* report) {
    return report ? report->r.hidden.size() : 0;
}

const char* psni_report_hidden_label(const psni_report* report, size_t index) {
    if (!report || index >= report->r.hidden.size()) return nullptr;
    return report->r.hidden[index].label.c_str();
}

double psni_report_hidden_prob(const psni_report* report, size_t index) {
    if (!report || index >= report->r.hidden.size()) return 0.0;
    return report->r.hidden[index].prob;
}

size_t psni_report_restricted_count(const psni_report* report) {
    return report ? report->r.restricted.size() : 0;
}

const char* psni_report_restricted_label(const psni_report* report,
                                         size_t index) {
    if (!report || index >= report->r.restricted.size()) return nullptr;
    return report->r.restricted[index].label.c_str();
}

double psni_report_restricted_prob(const psni_report* report, size_t index) {
    if (!report || index >= report->r.restricted.size()) return 0.0;
    return report->r.restricted[index].prob;
}

size_t psni_report_class_count(const psni_report* report) {
    return report ? report->r.classes.size() : 0;
}

const char* psni_report_class_label(const psni_report* report, size_t index) {
    if (!report || index >= report->r.classes.size()) return nullptr;
    return report->r.classes[index].label.c_str();
}

double psni_report_class_hidden_prob(const psni_report* report, size_t index) {
    if (!report || index >= report->r.classes.size()) return 0.0;
    return report->r.classes[index].hidden_prob;
}

double psni_report_class_restricted_prob(const psni_report* report,
                                         size_t index) {
    if (!report || index >= report->r.classes.size()) return 0.0;
    return report->r.classes[index].restricted_prob;
}

int psni_report_class_agree(const psni_report* report, size_t index) {
    if (!report || index >= report->r.classes.size()) return 0;
    return report->r.classes[index].agree ? 1 : 0;
}

}  // extern "C"
