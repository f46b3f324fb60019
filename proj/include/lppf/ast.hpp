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

#include <lppf/term.hpp>

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace lppf {

enum class ArithOp : std::uint8_t { Add, Sub, Mul, Div };
enum class CompareOp : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge };

const char* to_string(ArithOp op);
const char* to_string(CompareOp op);

/// Integer arithmetic over term leaves. A leaf has no operands; a binary node
/// has exactly two.
struct Expression {
    Term leaf;
    ArithOp op = ArithOp::Add;
    std::vector<Expression> operands;

    Expression() = default;
    Expression(Term t) : leaf(std::move(t)) {}  // NOLINT(google-explicit-constructor)
    static Expression binary(ArithOp op, Expression lhs, Expression rhs);

    bool is_leaf() const { return operands.empty(); }

    friend bool operator==(const Expression& a, const Expression& b);
};

/// `p(a)`: holds when p(a) = true.
struct PositiveAtom {
    Term term;
    friend bool operator==(const PositiveAtom&, const PositiveAtom&) = default;
};

/// `~p(a)`: holds when p(a) = false.
struct NegativeAtom {
    Term term;
    friend bool operator==(const NegativeAtom&, const NegativeAtom&) = default;
};

struct Comparison {
    Expression lhs;
    CompareOp op = CompareOp::Eq;
    Expression rhs;
    friend bool operator==(const Comparison&, const Comparison&) = default;
};

struct BodyLiteral {
    bool default_negated = false;
    std::variant<PositiveAtom, NegativeAtom, Comparison> payload;
    friend bool operator==(const BodyLiteral&, const BodyLiteral&) = default;
};

struct AssertHead {
    Term target;
    friend bool operator==(const AssertHead&, const AssertHead&) = default;
};

struct DenyHead {
    Term target;
    friend bool operator==(const DenyHead&, const DenyHead&) = default;
};

/// `f(a) := expr`
struct AssignHead {
    Term target;
    Expression value;
    friend bool operator==(const AssignHead&, const AssignHead&) = default;
};

/// `f(a) ^= expr`: applies only while no other value is established for f(a).
struct DefaultHead {
    Term target;
    Expression value;
    friend bool operator==(const DefaultHead&, const DefaultHead&) = default;
};

struct AggregateElement {
    Term term;
    std::vector<BodyLiteral> conditions;
    friend bool operator==(const AggregateElement&, const AggregateElement&) = default;
};

/// `#sum{ t : c1, c2 ; ... }`. Sums the distinct defined ground instances of
/// the element terms whose conditions hold.
struct SumAggregate {
    std::vector<AggregateElement> elements;
    friend bool operator==(const SumAggregate&, const SumAggregate&) = default;
};

struct AggregateHead {
    Term target;
    SumAggregate aggregate;
    friend bool operator==(const AggregateHead&, const AggregateHead&) = default;
};

/// Headless rule (integrity constraint).
struct ConstraintHead {
    friend bool operator==(const ConstraintHead&, const ConstraintHead&) = default;
};

using RuleHead = std::variant<AssertHead, DenyHead, AssignHead, DefaultHead, AggregateHead, ConstraintHead>;

/// Target function term of a head, or nullptr for constraints.
const Term* head_target(const RuleHead& head);

struct TextLabel {
    std::string text;  // may contain %Var placeholders
    friend bool operator==(const TextLabel&, const TextLabel&) = default;
};

struct TermLabel {
    Term term;
    friend bool operator==(const TermLabel&, const TermLabel&) = default;
};

using Label = std::variant<TextLabel, TermLabel>;

struct SourceSpan {
    std::string origin;
    int line = 0;
    int column = 0;
    int last_line = 0;
};

struct Rule {
    std::optional<Label> label;
    RuleHead head;
    std::vector<BodyLiteral> body;
    SourceSpan span;

    /// Structural equality; source spans are ignored.
    friend bool operator==(const Rule& a, const Rule& b) {
        return a.label == b.label && a.head == b.head && a.body == b.body;
    }
};

/// `#label L :: f(X).`
struct LabelDirective {
    Term label;
    Term pattern;
    SourceSpan span;
    friend bool operator==(const LabelDirective& a, const LabelDirective& b) {
        return a.label == b.label && a.pattern == b.pattern;
    }
};

/// `#explain f(X) :- conditions.`
struct ExplainDirective {
    Term target;
    std::vector<BodyLiteral> conditions;
    SourceSpan span;
    friend bool operator==(const ExplainDirective& a, const ExplainDirective& b) {
        return a.target == b.target && a.conditions == b.conditions;
    }
};

using Directive = std::variant<LabelDirective, ExplainDirective>;

struct Program {
    std::vector<Rule> rules;
    std::vector<Directive> directives;

    bool has_labels() const;
    std::vector<ExplainDirective> explain_directives() const;
    void append(const Program& other);

    friend bool operator==(const Program&, const Program&) = default;
};

/// Function terms (at any depth) appearing in an expression, in order.
void collect_function_terms(const Expression& expr, std::vector<const Term*>& out);
void collect_function_terms(const Term& term, std::vector<const Term*>& out);
void collect_variables(const Expression& expr, std::vector<std::string>& out);
void collect_variables(const BodyLiteral& literal, std::vector<std::string>& out);

}  // namespace lppf
