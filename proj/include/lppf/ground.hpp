// Copyright 2026 The lppf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <lppf/ast.hpp>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace lppf {

/// Piece of an interpolated text label. `value` is set for placeholders; it
/// is a constant for entity variables and an expression for aliases, which
/// are evaluated against the answer set when the label is displayed.
struct LabelSegment {
    std::string text;
    std::optional<Expression> value;
    friend bool operator==(const LabelSegment&, const LabelSegment&) = default;
};

struct TextTemplate {
    std::vector<LabelSegment> segments;
    friend bool operator==(const TextTemplate&, const TextTemplate&) = default;
};

using ResolvedLabel = std::variant<TextTemplate, Term>;

struct GroundRule {
    std::size_t origin = 0;  // index into the source Program's rules
    SourceSpan span;
    std::optional<ResolvedLabel> label;
    RuleHead head;
    std::vector<BodyLiteral> body;
};

struct GroundProgram {
    std::vector<GroundRule> rules;
    std::vector<Term> universe;        // first-occurrence order
    std::vector<Term> function_terms;  // flat function terms, structurally sorted
    std::vector<ExplainDirective> explain;
    bool has_labels = false;

    /// Ground rules as a Program (labels inlined), for dumps and re-grounding.
    Program to_program() const;
};

struct GroundOptions {
    std::size_t max_rules = 1'000'000;
    /// Only instantiate substitutions whose positive body function terms can
    /// possibly be defined. Disabling enumerates every variable over the
    /// whole universe.
    bool prune = true;
};

class GroundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

GroundProgram ground(const Program& program, const GroundOptions& options = {});

/// Constants (symbols, integers, strings) occurring in the rules, in order of
/// first occurrence.
std::vector<Term> universe_of(const Program& program);

/// Plain text of a constant for label display (strings unquoted).
std::string display_constant(const Term& value);

}  // namespace lppf
