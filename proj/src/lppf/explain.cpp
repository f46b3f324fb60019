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

#include <lppf/explain.hpp>

#include <lppf/render.hpp>

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <set>

namespace lppf {

namespace {

std::string default_display(const Term& atom, const Term& value) {
    if (value.is_true()) return to_string(atom, true);
    if (value.is_false()) return "~" + to_string(atom, true);
    return to_string(atom, true) + " = " + to_string(value);
}

std::string label_text(const ResolvedLabel& label, const Valuation& v) {
    if (const auto* t = std::get_if<Term>(&label)) return to_string(*t);
    std::string out;
    for (const auto& seg : std::get<TextTemplate>(label).segments) {
        if (!seg.value) {
            out += seg.text;
            continue;
        }
        std::optional<Term> value;
        try {
            value = evaluate(*seg.value, v);
        } catch (const SolveError&) {
        }
        out += value ? display_constant(*value) : render(*seg.value);
    }
    return out;
}

const AnswerSet& answer_at(const SolveResult& result, std::size_t answer) {
    if (answer >= result.answer_sets.size()) throw ExplainError("no answer set " + std::to_string(answer + 1));
    return result.answer_sets[answer];
}

using Path = std::vector<Term>;

class TreeBuilder {
public:
    TreeBuilder(const SolveResult& result, const AnswerSet& as, std::size_t cap)
        : program_(*result.program), as_(as), cap_(cap) {}

    std::vector<ExplanationNode> build(const Term& atom, Path& path) {
        std::vector<ExplanationNode> out;
        auto it = as_.supports.find(atom);
        const Term& value = as_.valuation.at(atom);
        if (it == as_.supports.end()) {
            out.push_back(leaf(atom, value, std::nullopt));
            return out;
        }
        path.push_back(atom);
        bool any_acyclic = false;
        for (const auto& support : it->second) {
            if (out.size() >= cap_) break;
            if (cyclic(support, path)) continue;
            any_acyclic = true;
            // Cross product of the children's alternatives.
            std::vector<std::vector<ExplanationNode>> partial{{}};
            for (const auto& w : support.witnesses) {
                auto options = build(w.term, path);
                std::vector<std::vector<ExplanationNode>> next;
                for (const auto& prefix : partial) {
                    for (const auto& opt : options) {
                        if (next.size() >= cap_) break;
                        next.push_back(prefix);
                        next.back().push_back(opt);
                    }
                }
                partial = std::move(next);
            }
            for (auto& children : partial) {
                if (out.size() >= cap_) break;
                ExplanationNode n = leaf(atom, value, support.rule);
                n.children = std::move(children);
                out.push_back(std::move(n));
            }
        }
        if (!any_acyclic) out.push_back(leaf(atom, value, it->second.front().rule));
        path.pop_back();
        return out;
    }

    // Number of alternatives without the cap, saturating.
    std::size_t count(const Term& atom, Path& path) {
        auto it = as_.supports.find(atom);
        if (it == as_.supports.end()) return 1;
        path.push_back(atom);
        std::size_t total = 0;
        bool any_acyclic = false;
        for (const auto& support : it->second) {
            if (cyclic(support, path)) continue;
            any_acyclic = true;
            std::size_t product = 1;
            for (const auto& w : support.witnesses) product = saturating_mul(product, count(w.term, path));
            total = saturating_add(total, product);
        }
        path.pop_back();
        return any_acyclic ? total : 1;
    }

private:
    static constexpr std::size_t kSaturate = std::size_t{1} << 40;
    const GroundProgram& program_;
    const AnswerSet& as_;
    std::size_t cap_;

    static std::size_t saturating_mul(std::size_t a, std::size_t b) {
        return (b != 0 && a > kSaturate / b) ? kSaturate : a * b;
    }
    static std::size_t saturating_add(std::size_t a, std::size_t b) { return std::min(kSaturate, a + b); }

    static bool cyclic(const Support& s, const Path& path) {
        return std::any_of(s.witnesses.begin(), s.witnesses.end(), [&](const Witness& w) {
            return std::find(path.begin(), path.end(), w.term) != path.end();
        });
    }

    ExplanationNode leaf(const Term& atom, const Term& value, std::optional<std::size_t> rule) const {
        ExplanationNode n;
        n.atom = atom;
        n.value = value;
        n.display = default_display(atom, value);
        if (rule) {
            n.rule = *rule;
            const GroundRule& r = program_.rules[*rule];
            n.fact = r.body.empty();
            if (r.label) {
                n.labeled = true;
                n.display = label_text(*r.label, as_.valuation);
            }
        }
        return n;
    }
};

// Labeled-mode view of a node: itself when labeled, otherwise its spliced
// labeled descendants.
std::vector<ExplanationNode> elide(ExplanationNode node) {
    std::vector<ExplanationNode> children;
    for (auto& c : node.children) {
        for (auto& e : elide(std::move(c))) children.push_back(std::move(e));
    }
    if (!node.labeled) return children;
    node.children = std::move(children);
    return {std::move(node)};
}

void normalize(ExplanationNode& node, const TermOrder& order) {
    for (auto& c : node.children) normalize(c, order);
    auto& cs = node.children;
    std::stable_sort(cs.begin(), cs.end(), [&](const ExplanationNode& a, const ExplanationNode& b) {
        if (int c = order.compare(a.atom, b.atom)) return c < 0;
        return a.display < b.display;
    });
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
}

bool match(const Term& pattern, const Term& term, std::map<std::string, Term>& b) {
    if (pattern.is_variable()) {
        auto [it, added] = b.emplace(pattern.name, term);
        return added || it->second == term;
    }
    if (pattern.kind != term.kind || pattern.name != term.name || pattern.number != term.number ||
        pattern.args.size() != term.args.size()) {
        return false;
    }
    for (std::size_t i = 0; i < pattern.args.size(); ++i) {
        if (!match(pattern.args[i], term.args[i], b)) return false;
    }
    return true;
}

Term substitute(const Term& t, const std::map<std::string, Term>& b) {
    if (t.is_variable()) {
        auto it = b.find(t.name);
        return it == b.end() ? t : it->second;
    }
    Term out = t;
    for (auto& a : out.args) a = substitute(a, b);
    return out;
}

Expression substitute(const Expression& e, const std::map<std::string, Term>& b) {
    if (e.is_leaf()) return Expression(substitute(e.leaf, b));
    return Expression::binary(e.op, substitute(e.operands[0], b), substitute(e.operands[1], b));
}

BodyLiteral substitute(const BodyLiteral& lit, const std::map<std::string, Term>& b) {
    BodyLiteral out = lit;
    std::visit(
        [&](auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, Comparison>) {
                p.lhs = substitute(p.lhs, b);
                p.rhs = substitute(p.rhs, b);
            } else {
                p.term = substitute(p.term, b);
            }
        },
        out.payload);
    return out;
}

// Whether the conditions hold for some extension of `b`. Variables left
// unbound are tried against alias equations, then every constant.
bool satisfiable(const std::vector<BodyLiteral>& conditions, std::map<std::string, Term> b, const Valuation& v,
                 const std::vector<Term>& universe) {
    std::vector<std::string> free;
    for (const auto& c : conditions) collect_variables(c, free);
    free.erase(std::remove_if(free.begin(), free.end(), [&](const std::string& x) { return b.count(x) > 0; }),
               free.end());
    if (free.empty()) {
        return std::all_of(conditions.begin(), conditions.end(),
                           [&](const BodyLiteral& c) { return holds(substitute(c, b), v); });
    }
    for (const auto& c : conditions) {
        const auto* cmp = std::get_if<Comparison>(&c.payload);
        if (c.default_negated || !cmp || cmp->op != CompareOp::Eq) continue;
        for (auto [var, other] : {std::pair{&cmp->lhs, &cmp->rhs}, std::pair{&cmp->rhs, &cmp->lhs}}) {
            if (!var->is_leaf() || !var->leaf.is_variable() || b.count(var->leaf.name)) continue;
            std::vector<std::string> vs;
            collect_variables(*other, vs);
            if (!std::all_of(vs.begin(), vs.end(), [&](const std::string& x) { return b.count(x) > 0; })) continue;
            std::optional<Term> value;
            try {
                value = evaluate(substitute(*other, b), v);
            } catch (const SolveError&) {
            }
            if (!value) return false;
            b.emplace(var->leaf.name, *value);
            return satisfiable(conditions, std::move(b), v, universe);
        }
    }
    const std::string var = free.front();
    for (const auto& c : universe) {
        b[var] = c;
        if (satisfiable(conditions, b, v, universe)) return true;
    }
    return false;
}

void sort_assignments(std::vector<Assignment>& out, const TermOrder& order) {
    std::sort(out.begin(), out.end(), [&](const Assignment& a, const Assignment& b) { return order(a.term, b.term); });
    out.erase(std::unique(out.begin(), out.end()), out.end());
}

void render_node(const ExplanationNode& node, int depth, std::string& out) {
    if (depth == 0) {
        out += "*";
    } else {
        out += ' ';
        for (int i = 1; i < depth; ++i) out += "|    ";
        out += "|-- ";
    }
    if (node.labeled) out += ' ';
    out += node.display;
    out += '\n';
    for (const auto& c : node.children) render_node(c, depth + 1, out);
}

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += ' '; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

ExplainMode default_mode(const SolveResult& result) {
    return result.program && result.program->has_labels ? ExplainMode::Labeled : ExplainMode::Default;
}

ExplanationSet explain(const Assignment& target, const SolveResult& result, std::size_t answer,
                       const ExplainOptions& options) {
    const AnswerSet& as = answer_at(result, answer);
    auto it = as.valuation.find(target.term);
    if (it == as.valuation.end() || !(it->second == target.value)) {
        throw ExplainError(render_assignment(target.term, target.value) + " does not hold in answer set " +
                           std::to_string(answer + 1));
    }
    ExplanationSet set{target.term, target.value, {}, 0};
    TreeBuilder builder(result, as, std::max<std::size_t>(options.max_alternatives, 1));
    Path path;
    auto trees = builder.build(target.term, path);
    std::size_t total = builder.count(target.term, path);
    TermOrder order(result.program->universe);

    for (auto& t : trees) {
        if (options.mode == ExplainMode::Default) {
            normalize(t, order);
            set.alternatives.push_back(std::move(t));
            continue;
        }
        std::vector<ExplanationNode> kept;
        if (t.labeled) {
            kept = elide(std::move(t));
        } else if (!t.fact) {
            // Unlabeled derived root: keep it so the target is still shown.
            std::vector<ExplanationNode> children;
            for (auto& c : t.children) {
                for (auto& e : elide(std::move(c))) children.push_back(std::move(e));
            }
            t.children = std::move(children);
            kept.push_back(std::move(t));
        }
        for (auto& k : kept) {
            normalize(k, order);
            if (std::find(set.alternatives.begin(), set.alternatives.end(), k) == set.alternatives.end()) {
                set.alternatives.push_back(std::move(k));
            }
        }
    }
    if (total > trees.size()) set.omitted = total - trees.size();
    return set;
}

std::vector<Assignment> derived_assignments(const SolveResult& result, std::size_t answer) {
    const AnswerSet& as = answer_at(result, answer);
    std::vector<Assignment> out;
    for (const auto& [k, v] : as.valuation) {
        if (!as.facts.count(k)) out.push_back({k, v});
    }
    sort_assignments(out, TermOrder(result.program->universe));
    return out;
}

std::vector<Assignment> select_matching(const SolveResult& result, std::size_t answer, const Term& pattern,
                                        const std::optional<Term>& value) {
    const AnswerSet& as = answer_at(result, answer);
    std::vector<Assignment> out;
    for (const auto& [k, v] : as.valuation) {
        std::map<std::string, Term> b;
        if (!match(pattern, k, b)) continue;
        if (value && !match(*value, v, b)) continue;
        out.push_back({k, v});
    }
    sort_assignments(out, TermOrder(result.program->universe));
    return out;
}

std::vector<Assignment> select_targets(const SolveResult& result, std::size_t answer) {
    const AnswerSet& as = answer_at(result, answer);
    const auto& directives = result.program->explain;
    if (directives.empty()) return derived_assignments(result, answer);
    std::vector<Assignment> out;
    for (const auto& d : directives) {
        for (const auto& [k, v] : as.valuation) {
            std::map<std::string, Term> b;
            if (!match(d.target, k, b)) continue;
            if (satisfiable(d.conditions, b, as.valuation, result.program->universe)) out.push_back({k, v});
        }
    }
    sort_assignments(out, TermOrder(result.program->universe));
    return out;
}

std::string render_text(const std::vector<ExplanationSet>& sets) {
    std::string out;
    for (const auto& s : sets) {
        for (const auto& alt : s.alternatives) {
            render_node(alt, 0, out);
            out += '\n';
        }
        if (s.omitted) out += "+" + std::to_string(s.omitted) + " more\n\n";
    }
    out += std::to_string(sets.size()) + " ocurrences explained.\n";
    return out;
}

std::string render_dot(const std::vector<ExplanationSet>& sets) {
    std::string out = "digraph explanation {\n  node [shape=box];\n";
    int next = 0;
    std::function<int(const ExplanationNode&)> emit = [&](const ExplanationNode& n) {
        int id = next++;
        out += "  n" + std::to_string(id) + " [label=\"" + dot_escape(n.display) + "\"];\n";
        for (const auto& c : n.children) {
            int child = emit(c);
            out += "  n" + std::to_string(id) + " -> n" + std::to_string(child) + ";\n";
        }
        return id;
    };
    for (const auto& s : sets) {
        for (const auto& alt : s.alternatives) emit(alt);
    }
    return out + "}\n";
}

nlohmann::json to_json(const ExplanationNode& node) {
    nlohmann::json children = nlohmann::json::array();
    for (const auto& c : node.children) children.push_back(to_json(c));
    return {{"display", node.display},
            {"atom", to_string(node.atom, true)},
            {"value", to_string(node.value)},
            {"labeled", node.labeled},
            {"fact", node.fact},
            {"children", std::move(children)}};
}

nlohmann::json to_json(const std::vector<ExplanationSet>& sets) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& s : sets) {
        nlohmann::json alts = nlohmann::json::array();
        for (const auto& a : s.alternatives) alts.push_back(to_json(a));
        list.push_back({{"target", to_string(s.target, true)},
                        {"value", to_string(s.value)},
                        {"alternatives", std::move(alts)},
                        {"omitted", s.omitted}});
    }
    return {{"explanations", std::move(list)}};
}

std::string render_answers(const SolveResult& result, const std::vector<std::vector<ExplanationSet>>* explanations) {
    std::string out;
    for (std::size_t i = 0; i < result.answer_sets.size(); ++i) {
        out += "Answer:" + std::to_string(i + 1) + "\n";
        if (explanations) {
            out += "\n";
            static const std::vector<ExplanationSet> none;
            out += render_text(i < explanations->size() ? (*explanations)[i] : none);
        } else {
            for (const auto& a : derived_assignments(result, i)) out += render_assignment(a.term, a.value) + "\n";
        }
    }
    std::size_t n = result.answer_sets.size();
    out += "\n" + std::to_string(n) + (n == 1 ? " solution\n" : " solutions\n");
    return out;
}

}  // namespace lppf
