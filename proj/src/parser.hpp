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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "terms.hpp"

namespace pepa {

struct ParseDiagnostic {
    enum class Severity { Error, Warning };

    int line = 1;        // 1-based
    int column = 1;      // 1-based
    Severity severity = Severity::Error;
    std::string message;
};

/// Result of parsing a .pepa source. env is present iff no error-severity
/// diagnostics were produced; warnings may accompany a successful parse.
struct ParseResult {
    std::optional<ModelEnv> env;
    std::vector<ParseDiagnostic> diagnostics;

    bool ok() const { return env.has_value(); }
};

/// Parses the .pepa text format:
///
///   model   := header* def+ sysdecl
///   header  := "high" "=" "{" identlist "}" ";"
///   def     := CONST ":=" term ";"
///   sysdecl := "system" term ";"
///   term    := coop
///   coop    := hiding ( "<" identlist? ">" hiding )*
///   hiding  := choice ( "/" "{" identlist "}" )*
///   choice  := prefix ( "+" prefix )*
///   prefix  := "(" IDENT "," rate ")" "." prefix | CONST | "(" term ")"
///   rate    := RATIONAL | INT "*" "T" | "T"
///
/// Constants start uppercase, actions lowercase; "tau" is reserved and cannot
/// be written in source. Comments run from '%' to end of line. Never throws:
/// ill-formed input comes back as positioned diagnostics.
ParseResult parse_model(std::string_view source);

/// Deterministic canonical text; parse of the result is structurally equal to
/// the input term. Used for state labels in reports and DOT output.
std::string render_term(const Term& t);
std::string render_term(const TermPtr& t);

/// Canonical whole-model echo: high header, definitions in name order, system.
std::string render_model(const ModelEnv& env);

/// Warnings about the high set against the current model: declared-but-unused
/// high actions and high actions inside cooperation sets. parse_model already
/// emits these; call again after overriding env.high.
std::vector<ParseDiagnostic> high_usage_warnings(const ModelEnv& env);

}  // namespace pepa
