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

#include <lppf/ast.hpp>

#include <algorithm>

namespace lppf {

const char* to_string(ArithOp op) {
    switch (op) {
        case ArithOp::Add: return "+";
        case ArithOp::Sub: return "-";
        case ArithOp::Mul: return "*";
        case ArithOp::Div: return "/";
    }
    return "?";
}

const char* to_string(CompareOp op) {
    switch (op) {
        case CompareOp::Eq: return "=";
        case CompareOp::Ne: return "!=";
        case CompareOp::Lt: return "<";
        case CompareOp::Le: return "<=";
        case CompareOp::Gt: return ">";
        case CompareOp::Ge: return ">=";
    }
    return "?";
}

Expression Expression::binary(ArithOp op, Expression lhs, Expression rhs) {
    Expression e;
    e.op = op;
    e.operands.reserve(2);
    e.operands.push_back(std::move(lhs));
    e.operands.push_back(std::move(rhs));
    return e;
}

bool operator==(const Expression& a, const Expression& b) {
    if (a.is_leaf() != b.is_leaf()) return false;
    if (a.is_leaf()) return a.leaf == b.leaf;
    return a.op == b.op && a.operands == b.operands;
}

const Term* head_target(const RuleHead& head) {
    return std::visit(
        [](const auto& h) -> const Term* {
            using H = std::decay_t<decltype(h)>;
            if constexpr (std::is_same_v<H, ConstraintHead>) {
                return nullptr;
            } else {
                return &h.target;
            }
        },
        head);
}

bool Program::has_labels() const {
    if (std::any_of(rules.begin(), rules.end(), [](const Rule& r) { return r.label.has_value(); })) return true;
    return std::any_of(directives.begin(), directives.end(),
                       [](const Directive& d) { return std::holds_alternative<LabelDirective>(d); });
}

std::vector<ExplainDirective> Program::explain_directives() const {
    std::vector<ExplainDirective> out;
    for (const auto& d : directives) {
        if (const auto* e = std::get_if<ExplainDirective>(&d)) out.push_back(*e);
    }
    return out;
}

void Program::append(const Program& other) {
    rules.insert(rules.end(), other.rules.begin(), other.rules.end());
    directives.insert(directives.end(), other.directives.begin(), other.directives.end());
}

void collect_function_terms(const Term& term, std::vector<const Term*>& out) {
    if (!term.is_function()) return;
    out.push_back(&term);
    for (const auto& a : term.args) collect_function_terms(a, out);
}

void collect_function_terms(const Expression& expr, std::vector<const Term*>& out) {
    if (expr.is_leaf()) {
        collect_function_terms(expr.leaf, out);
        return;
    }
    for (const auto& e : expr.operands) collect_function_terms(e, out);
}

void collect_variables(const Expression& expr, std::vector<std::string>& out) {
    if (expr.is_leaf()) {
        collect_variables(expr.leaf, out);
        return;
    }
    for (const auto& e : expr.operands) collect_variables(e, out);
}

void collect_variables(const BodyLiteral& literal, std::vector<std::string>& out) {
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, Comparison>) {
                collect_variables(p.lhs, out);
                collect_variables(p.rhs, out);
            } else {
                collect_variables(p.term, out);
            }
        },
        literal.payload);
}

}  // namespace lppf
