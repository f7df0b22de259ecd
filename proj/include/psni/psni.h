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

/*
 * psni -- C API of the PEPA noninterference model checker.
 *
 * The library parses PEPA models, derives their labelled multi-transition
 * systems and underlying CTMCs, computes coarsest lumpable partitions, and
 * decides persistent stochastic noninterference by two independent methods.
 *
 * Conventions:
 *   - Every object is an opaque handle created by a psni_* call and released
 *     by the matching *_free; handles are immutable after creation except for
 *     psni_model_set_high.
 *   - Fallible calls return psni_status; PSNI_OK means out-parameters are
 *     valid. psni_last_error() describes the most recent failure on the
 *     calling thread.
 *   - const char* results returned without an out-parameter are owned by the
 *     handle they came from and live as long as it. char** out-parameters
 *     transfer ownership; release them with psni_string_free.
 *   - Rates are reported both as exact fraction strings ("3/2", "2*T") and as
 *     doubles.
 */

#ifndef PSNI_H
#define PSNI_H

#include <stddef.h>

#if defined(__GNUC__)
#define PSNI_API __attribute__((visibility("default")))
#else
#define PSNI_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum psni_status {
    PSNI_OK = 0,
    PSNI_ERR_IO = 1,                     /* file not found / unreadable */
    PSNI_ERR_PARSE = 2,                  /* diagnostics carry the details */
    PSNI_ERR_INVALID_ARGUMENT = 3,
    PSNI_ERR_ILL_FORMED = 4,             /* model violates a structural rule */
    PSNI_ERR_UNDEFINED_CONSTANT = 5,
    PSNI_ERR_MIXED_RATE_SUM = 6,         /* finite + passive in one apparent rate */
    PSNI_ERR_STATE_SPACE_EXCEEDED = 7,
    PSNI_ERR_PASSIVE_RATE_REACHABLE = 8, /* no CTMC exists */
    PSNI_ERR_NOT_IRREDUCIBLE = 9,
    PSNI_ERR_SINGULAR_SYSTEM = 10,
    PSNI_ERR_INTERNAL = 11
} psni_status;

typedef enum psni_severity {
    PSNI_SEVERITY_ERROR = 0,
    PSNI_SEVERITY_WARNING = 1
} psni_severity;

typedef enum psni_ignore_mode {
    PSNI_IGNORE_TAU = 0,         /* plain lumpable bisimilarity */
    PSNI_IGNORE_HIGH_AND_TAU = 1 /* lumpable bisimilarity up to the high set */
} psni_ignore_mode;

typedef enum psni_method {
    PSNI_METHOD_BISIM = 1,
    PSNI_METHOD_UNWINDING = 2,
    PSNI_METHOD_BOTH = 3
} psni_method;

typedef struct psni_model psni_model;
typedef struct psni_diagnostics psni_diagnostics;
typedef struct psni_graph psni_graph;
typedef struct psni_generator psni_generator;
typedef struct psni_partition psni_partition;
typedef struct psni_verdict psni_verdict;
typedef struct psni_report psni_report;

/* ------------------------------------------------------------------ basics */

PSNI_API const char* psni_version(void);

/* Message describing the last failing call on this thread; never NULL. */
PSNI_API const char* psni_last_error(void);

PSNI_API void psni_string_free(char* s);

/* Pass as max_states to use the built-in default (100000 states). */
#define PSNI_DEFAULT_MAX_STATES 0

/* ----------------------------------------------------------------- parsing */

typedef struct psni_diag_info {
    int line;   /* 1-based */
    int column; /* 1-based */
    psni_severity severity;
    const char* message; /* owned by the diagnostics handle */
} psni_diag_info;

/*
 * Parse .pepa source text. On PSNI_OK, *model is the parsed model (warnings,
 * if any, are in *diags). On PSNI_ERR_PARSE, *model is NULL and *diags holds
 * at least one error. Either out-parameter may be NULL if not wanted.
 */
PSNI_API psni_status psni_parse_string(const char* source, psni_model** model,
                                       psni_diagnostics** diags);
PSNI_API psni_status psni_parse_file(const char* path, psni_model** model,
                                     psni_diagnostics** diags);
PSNI_API void psni_model_free(psni_model* model);

PSNI_API void psni_diagnostics_free(psni_diagnostics* diags);
PSNI_API size_t psni_diagnostics_count(const psni_diagnostics* diags);
PSNI_API psni_status psni_diagnostics_get(const psni_diagnostics* diags,
                                          size_t index, psni_diag_info* out);

/* Canonical model text; round-trips through the parser. */
PSNI_API psni_status psni_model_render(const psni_model* model, char** text);

/* Replace the high action set (e.g. a command-line override). Rejects tau. */
PSNI_API psni_status psni_model_set_high(psni_model* model,
                                         const char* const* actions,
                                         size_t count);
PSNI_API size_t psni_model_high_count(const psni_model* model);
PSNI_API const char* psni_model_high_at(const psni_model* model, size_t index);

/* Warnings about the current high set (unused actions, cooperation sets). */
PSNI_API psni_status psni_model_warnings(const psni_model* model,
                                         psni_diagnostics** diags);

/* ------------------------------------------------------------------ graphs */

typedef struct psni_transition_info {
    size_t source;
    size_t target;
    const char* action;  /* owned by the graph handle */
    const char* rate;    /* exact: "3/2", "T", "2*T"; owned by the graph */
    double rate_value;   /* rate if finite, weight if passive */
    int is_passive;
    unsigned multiplicity;
} psni_transition_info;

/* Labelled multi-transition system of the model's designated system. */
PSNI_API psni_status psni_graph_derive(const psni_model* model,
                                       size_t max_states, psni_graph** graph);
PSNI_API void psni_graph_free(psni_graph* graph);

PSNI_API size_t psni_graph_state_count(const psni_graph* graph);
PSNI_API size_t psni_graph_root(const psni_graph* graph);
PSNI_API const char* psni_graph_state_label(const psni_graph* graph,
                                            size_t state);
PSNI_API size_t psni_graph_transition_count(const psni_graph* graph);
PSNI_API psni_status psni_graph_transition(const psni_graph* graph,
                                           size_t index,
                                           psni_transition_info* out);

/* Low views: delete high arcs (restrict) or relabel them to tau (hide). */
PSNI_API psni_status psni_graph_restrict_high(const psni_graph* graph,
                                              psni_graph** out);
PSNI_API psni_status psni_graph_hide_high(const psni_graph* graph,
                                          psni_graph** out);

/* -------------------------------------------------------------------- CTMC */

typedef struct psni_generator_entry_info {
    size_t row;
    size_t col;
    const char* rate; /* exact fraction string, owned by the generator */
    double value;
} psni_generator_entry_info;

PSNI_API psni_status psni_generator_build(const psni_graph* graph,
                                          psni_generator** generator);
PSNI_API void psni_generator_free(psni_generator* generator);
PSNI_API size_t psni_generator_dim(const psni_generator* generator);
PSNI_API size_t psni_generator_entry_count(const psni_generator* generator);
PSNI_API psni_status psni_generator_entry(const psni_generator* generator,
                                          size_t index,
                                          psni_generator_entry_info* out);
PSNI_API psni_status psni_generator_diagonal(const psni_generator* generator,
                                             size_t state, const char** rate,
                                             double* value);

/* Steady-state distribution; probs must hold psni_generator_dim doubles. */
PSNI_API psni_status psni_steady_state(const psni_generator* generator,
                                       double* probs);

/* ----------------------------------------------------------------- lumping */

PSNI_API psni_status psni_lump(const psni_graph* graph, psni_ignore_mode mode,
                               psni_partition** partition);
PSNI_API void psni_partition_free(psni_partition* partition);
PSNI_API size_t psni_partition_block_count(const psni_partition* partition);
PSNI_API size_t psni_partition_block_of(const psni_partition* partition,
                                        size_t state);
PSNI_API size_t psni_partition_block_size(const psni_partition* partition,
                                          size_t block);
PSNI_API psni_status psni_partition_block_member(const psni_partition* partition,
                                                 size_t block, size_t index,
                                                 size_t* state);

/* ---------------------------------------------------------------- security */

typedef struct psni_witness_info {
    size_t source;
    size_t target;
    const char* action;       /* "" for the bisim root pair */
    const char* rate;         /* "" for the bisim root pair */
    const char* source_label; /* owned by the verdict */
    const char* target_label;
    int is_root_pair;
} psni_witness_info;

/*
 * Decide persistent stochastic noninterference for the model's system.
 * PSNI_METHOD_BOTH runs the bisimulation and unwinding characterizations and
 * fails with PSNI_ERR_INTERNAL if they ever disagree.
 */
PSNI_API psni_status psni_check(const psni_model* model, psni_method method,
                                size_t max_states, psni_verdict** verdict);
PSNI_API void psni_verdict_free(psni_verdict* verdict);
PSNI_API int psni_verdict_holds(const psni_verdict* verdict);
PSNI_API psni_method psni_verdict_method(const psni_verdict* verdict);
PSNI_API size_t psni_verdict_state_count(const psni_verdict* verdict);
PSNI_API size_t psni_verdict_block_count(const psni_verdict* verdict);
PSNI_API size_t psni_verdict_block_size(const psni_verdict* verdict,
                                        size_t block);
PSNI_API int psni_verdict_has_witness(const psni_verdict* verdict);
PSNI_API psni_status psni_verdict_witness(const psni_verdict* verdict,
                                          psni_witness_info* out);
PSNI_API size_t psni_verdict_note_count(const psni_verdict* verdict);
PSNI_API const char* psni_verdict_note(const psni_verdict* verdict,
                                       size_t index);

/*
 * Steady states of the hidden view (high actions relabelled to tau) and the
 * restricted view (high arcs removed) side by side, with classwise totals
 * over lumpably equivalent states.
 */
PSNI_API psni_status psni_report_build(const psni_model* model,
                                       size_t max_states, psni_report** report);
PSNI_API void psni_report_free(psni_report* report);
PSNI_API size_t psni_report_hidden_count(const psni_report* report);
PSNI_API const char* psni_report_hidden_label(const psni_report* report,
                                              size_t index);
PSNI_API double psni_report_hidden_prob(const psni_report* report, size_t index);
PSNI_API size_t psni_report_restricted_count(const psni_report* report);
PSNI_API const char* psni_report_restricted_label(const psni_report* report,
                                                  size_t index);
PSNI_API double psni_report_restricted_prob(const psni_report* report,
                                            size_t index);
PSNI_API size_t psni_report_class_count(const psni_report* report);
PSNI_API const char* psni_report_class_label(const psni_report* report,
                                             size_t index);
PSNI_API double psni_report_class_hidden_prob(const psni_report* report,
                                              size_t index);
PSNI_API double psni_report_class_restricted_prob(const psni_report* report,
                                                  size_t index);
PSNI_API int psni_report_class_agree(const psni_report* report, size_t index);

#ifdef __cplusplus
}
#endif

#endif /* PSNI_H */
