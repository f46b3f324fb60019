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

#include <lppf/render.hpp>

namespace lppf {

namespace {

int precedence(const Expression& e) {
    if (e.is_leaf()) return 3;
    return (e.op == ArithOp::Mul || e.op == ArithOp::Div) ? 2 : 1;
}

std::string join(const std::vector<BodyLiteral>& lits) {
    std::string out;
    for (std::size_t i = 0; i < lits.size(); ++i) {
        if (i) out += ", ";
        out += render(lits[i]);
    }
    return out;
}

std::string render_aggregate(const SumAggregate& agg) {
    if (agg.elements.empty()) return "#sum{}";
    std::string out = "#sum{ ";
    for (std::size_t i = 0; i < agg.elements.size(); ++i) {
        if (i) out += "; ";
        const auto& el = agg.elements[i];
        out += to_string(el.term, true);
        if (!el.conditions.empty()) out += " : " + join(el.conditions);
    }
    return out + " }";
}

std::string render_head(const RuleHead& head, bool fact) {
    const char* assign = fact ? ":=" : " := ";
    const char* deflt = fact ? "^=" : " ^= ";
    return std::visit(
        [&](const auto& h) -> std::string {
            using H = std::decay_t<decltype(h)>;
            if constexpr (std::is_same_v<H, AssertHead>) {
                return to_string(h.target, true);
            } else if constexpr (std::is_same_v<H, DenyHead>) {
                return "~" + to_string(h.target, true);
            } else if constexpr (std::is_same_v<H, AssignHead>) {
                return to_string(h.target, true) + assign + render(h.value);
            } else if constexpr (std::is_same_v<H, DefaultHead>) {
                return to_string(h.target, true) + deflt + render(h.value);
            } else if constexpr (std::is_same_v<H, AggregateHead>) {
                return to_string(h.target, true) + assign + render_aggregate(h.aggregate);
            } else {
                return {};
            }
        },
        head);
}

}  // namespace

std::string render(const Expression& expr) {
    if (expr.is_leaf()) return to_string(expr.leaf, false);
    const auto& lhs = expr.operands[0];
    const auto& rhs = expr.operands[1];
    int p = precedence(expr);
    std::string l = render(lhs);
    std::string r = render(rhs);
    if (precedence(lhs) < p) l = "(" + l + ")";
    if (precedence(rhs) <= p) r = "(" + r + ")";
    return l + to_string(expr.op) + r;
}

std::string render(const BodyLiteral& literal) {
    std::string out = literal.default_negated ? "not " : "";
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, PositiveAtom>) {
                out += to_string(p.term, true);
            } else if constexpr (std::is_same_v<P, NegativeAtom>) {
                out += "~" + to_string(p.term, true);
            } else {
                out += render(p.lhs) + to_string(p.op) + render(p.rhs);
            }
        },
        literal.payload);
    return out;
}

std::string render(const RuleHead& head) { return render_head(head, false); }

std::string render(const Label& label) {
    if (const auto* t = std::get_if<TextLabel>(&label)) return quote(t->text);
    return to_string(std::get<TermLabel>(label).term, false);
}

std::string render(const Rule& rule) {
    std::string out;
    if (rule.label) out += render(*rule.label) + " :: ";
    if (std::holds_alternative<ConstraintHead>(rule.head)) return out + ":- " + join(rule.body) + ".";
    out += render_head(rule.head, rule.body.empty());
    if (!rule.body.empty()) out += " :- " + join(rule.body);
    return out + ".";
}

std::string render(const Directive& directive) {
    if (const auto* l = std::get_if<LabelDirective>(&directive)) {
        return "#label " + to_string(l->label, false) + " :: " + to_string(l->pattern, true) + ".";
    }
    const auto& e = std::get<ExplainDirective>(directive);
    std::string out = "#explain " + to_string(e.target, true);
    if (!e.conditions.empty()) out += " :- " + join(e.conditions);
    return out + ".";
}

std::string render(const Program& program) {
    std::string out;
    for (const auto& r : program.rules) out += render(r) + "\n";
    for (const auto& d : program.directives) out += render(d) + "\n";
    return out;
}

}  // namespace lppf
