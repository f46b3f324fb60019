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

#include <lppf/ground.hpp>

#include <lppf/parser.hpp>
#include <lppf/render.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace lppf {

std::string display_constant(const Term& value) {
    if (value.kind == Term::Kind::Text) return value.name;
    return to_string(value, true);
}

namespace {

// ---- universe -------------------------------------------------------------

class UniverseCollector {
public:
    void term(const Term& t) {
        if (t.is_constant()) {
            if (seen_.insert(t).second) out_.push_back(t);
            return;
        }
        for (const auto& a : t.args) term(a);
    }
    void expr(const Expression& e) {
        if (e.is_leaf()) {
            term(e.leaf);
            return;
        }
        for (const auto& o : e.operands) expr(o);
    }
    void literal(const BodyLiteral& lit) {
        std::visit(
            [&](const auto& p) {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, Comparison>) {
                    expr(p.lhs);
                    expr(p.rhs);
                } else {
                    term(p.term);
                }
            },
            lit.payload);
    }
    void rule(const Rule& r) {
        std::visit(
            [&](const auto& h) {
                using H = std::decay_t<decltype(h)>;
                if constexpr (std::is_same_v<H, AssignHead> || std::is_same_v<H, DefaultHead>) {
                    term(h.target);
                    expr(h.value);
                } else if constexpr (std::is_same_v<H, AggregateHead>) {
                    term(h.target);
                    for (const auto& el : h.aggregate.elements) {
                        term(el.term);
                        for (const auto& c : el.conditions) literal(c);
                    }
                } else if constexpr (!std::is_same_v<H, ConstraintHead>) {
                    term(h.target);
                }
            },
            r.head);
        for (const auto& lit : r.body) literal(lit);
    }
    std::vector<Term> take() { return std::move(out_); }

private:
    std::set<Term> seen_;
    std::vector<Term> out_;
};

// ---- substitution ---------------------------------------------------------

using Bindings = std::map<std::string, Expression>;

Term subst(const Term& t, const Bindings& b) {
    if (t.is_variable()) {
        auto it = b.find(t.name);
        if (it == b.end()) return t;
        if (!it->second.is_leaf()) {
            throw GroundError("variable '" + t.name + "' is bound to an arithmetic expression and cannot be used as a term");
        }
        return it->second.leaf;
    }
    if (!t.is_function()) return t;
    Term out = t;
    for (auto& a : out.args) a = subst(a, b);
    return out;
}

Expression subst(const Expression& e, const Bindings& b) {
    if (e.is_leaf()) {
        if (e.leaf.is_variable()) {
            auto it = b.find(e.leaf.name);
            if (it != b.end()) return it->second;
            return e;
        }
        return Expression(subst(e.leaf, b));
    }
    return Expression::binary(e.op, subst(e.operands[0], b), subst(e.operands[1], b));
}

BodyLiteral subst(const BodyLiteral& lit, const Bindings& b) {
    BodyLiteral out;
    out.default_negated = lit.default_negated;
    out.payload = std::visit(
        [&](const auto& p) -> decltype(out.payload) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, Comparison>) {
                return Comparison{subst(p.lhs, b), p.op, subst(p.rhs, b)};
            } else {
                return P{subst(p.term, b)};
            }
        },
        lit.payload);
    return out;
}

std::vector<BodyLiteral> subst(const std::vector<BodyLiteral>& lits, const Bindings& b) {
    std::vector<BodyLiteral> out;
    out.reserve(lits.size());
    for (const auto& l : lits) out.push_back(subst(l, b));
    return out;
}

// ---- binding analysis -----------------------------------------------------

void positive_occurrences(const std::vector<BodyLiteral>& lits, std::vector<const Term*>& out) {
    for (const auto& lit : lits) {
        if (lit.default_negated) continue;
        std::visit(
            [&](const auto& p) {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, Comparison>) {
                    collect_function_terms(p.lhs, out);
                    collect_function_terms(p.rhs, out);
                } else {
                    collect_function_terms(p.term, out);
                }
            },
            lit.payload);
    }
}

struct Alias {
    std::string variable;
    const Expression* definition;
};

// Variables bound by argument positions, and aliases in resolution order.
struct BindingPlan {
    std::vector<const Term*> occurrences;
    std::vector<std::string> position_vars;  // first-occurrence order
    std::vector<Alias> aliases;
};

BindingPlan plan_bindings(const std::vector<const Term*>& occurrences, const std::vector<BodyLiteral>& lits,
                          std::set<std::string> bound) {
    BindingPlan plan;
    plan.occurrences = occurrences;
    for (const Term* occ : occurrences) {
        for (const auto& a : occ->args) {
            if (a.is_variable() && bound.insert(a.name).second) plan.position_vars.push_back(a.name);
        }
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& lit : lits) {
            const auto* cmp = std::get_if<Comparison>(&lit.payload);
            if (lit.default_negated || !cmp || cmp->op != CompareOp::Eq) continue;
            auto try_alias = [&](const Expression& var, const Expression& other) {
                if (!var.is_leaf() || !var.leaf.is_variable() || bound.count(var.leaf.name)) return;
                std::vector<std::string> vs;
                collect_variables(other, vs);
                if (std::all_of(vs.begin(), vs.end(), [&](const std::string& v) { return bound.count(v) > 0; })) {
                    bound.insert(var.leaf.name);
                    plan.aliases.push_back({var.leaf.name, &other});
                    changed = true;
                }
            };
            try_alias(cmp->lhs, cmp->rhs);
            try_alias(cmp->rhs, cmp->lhs);
        }
    }
    return plan;
}

using Signature = std::pair<std::string, std::size_t>;

struct Domain {
    std::set<std::vector<Term>> tuples;
    bool any = false;
};

using Domains = std::map<Signature, Domain>;

Signature signature_of(const Term& t) { return {t.name, t.args.size()}; }

// Enumerates substitutions for the plan's position variables, starting from
// `base`. With domains, occurrences are matched against possibly-defined
// tuples; variables not bound that way range over the universe.
class Enumerator {
public:
    Enumerator(const BindingPlan& plan, const Domains* domains, const std::vector<Term>& universe)
        : plan_(plan), domains_(domains), universe_(universe) {}

    void run(const std::map<std::string, Term>& base, const std::function<void(const Bindings&)>& emit) {
        emit_ = &emit;
        current_ = base;
        if (domains_) {
            match(0);
        } else {
            spread(0);
        }
    }

private:
    const BindingPlan& plan_;
    const Domains* domains_;
    const std::vector<Term>& universe_;
    const std::function<void(const Bindings&)>* emit_ = nullptr;
    std::map<std::string, Term> current_;

    void match(std::size_t idx) {
        if (idx == plan_.occurrences.size()) {
            spread(0);
            return;
        }
        const Term& occ = *plan_.occurrences[idx];
        auto it = domains_->find(signature_of(occ));
        if (it == domains_->end()) return;  // never defined: the literal cannot hold
        const Domain& dom = it->second;
        if (dom.any) {
            match(idx + 1);
            return;
        }
        for (const auto& tuple : dom.tuples) {
            std::vector<std::string> added;
            bool ok = true;
            for (std::size_t i = 0; i < tuple.size() && ok; ++i) {
                const Term& arg = occ.args[i];
                if (arg.is_variable()) {
                    auto b = current_.find(arg.name);
                    if (b == current_.end()) {
                        current_.emplace(arg.name, tuple[i]);
                        added.push_back(arg.name);
                    } else {
                        ok = b->second == tuple[i];
                    }
                } else if (arg.is_constant()) {
                    ok = arg == tuple[i];
                } else if (arg.is_function() && arg.is_ground()) {
                    // Nested term: its value is only known at solve time.
                }
            }
            if (ok) match(idx + 1);
            for (const auto& v : added) current_.erase(v);
        }
    }

    void spread(std::size_t idx) {
        while (idx < plan_.position_vars.size() && current_.count(plan_.position_vars[idx])) ++idx;
        if (idx == plan_.position_vars.size()) {
            finish();
            return;
        }
        const std::string& var = plan_.position_vars[idx];
        for (const auto& c : universe_) {
            current_.emplace(var, c);
            spread(idx + 1);
            current_.erase(var);
        }
    }

    void finish() {
        Bindings b;
        for (const auto& [k, v] : current_) b.emplace(k, Expression(v));
        for (const auto& alias : plan_.aliases) b[alias.variable] = subst(*alias.definition, b);
        (*emit_)(b);
    }
};

bool match_pattern(const Term& pattern, const Term& term, std::map<std::string, Term>& b) {
    if (pattern.is_variable()) {
        auto it = b.find(pattern.name);
        if (it == b.end()) {
            b.emplace(pattern.name, term);
            return true;
        }
        return it->second == term;
    }
    if (pattern.kind != term.kind || pattern.name != term.name || pattern.number != term.number ||
        pattern.args.size() != term.args.size()) {
        return false;
    }
    for (std::size_t i = 0; i < pattern.args.size(); ++i) {
        if (!match_pattern(pattern.args[i], term.args[i], b)) return false;
    }
    return true;
}

class Grounder {
public:
    Grounder(const Program& program, const GroundOptions& options) : program_(program), options_(options) {}

    GroundProgram run() {
        GroundProgram out;
        out.universe = universe_of(program_);
        out.explain = program_.explain_directives();
        out.has_labels = program_.has_labels();
        for (const auto& d : program_.directives) {
            if (const auto* l = std::get_if<LabelDirective>(&d)) label_directives_.push_back(l);
        }

        plans_.reserve(program_.rules.size());
        for (const auto& rule : program_.rules) {
            std::vector<const Term*> occ;
            positive_occurrences(rule.body, occ);
            plans_.push_back(plan_bindings(occ, rule.body, {}));
        }

        if (options_.prune) {
            compute_domains(out.universe);
        } else {
            check_universe_size(out.universe);
        }

        counts_.assign(program_.rules.size(), 0);
        std::set<std::pair<std::size_t, std::string>> seen;
        for (std::size_t i = 0; i < program_.rules.size(); ++i) {
            const Rule& rule = program_.rules[i];
            Enumerator en(plans_[i], options_.prune ? &domains_ : nullptr, out.universe);
            en.run({}, [&](const Bindings& b) {
                GroundRule gr = instantiate(i, rule, b, out.universe);
                if (!seen.emplace(i, render(Rule{std::nullopt, gr.head, gr.body, {}})).second) return;
                ++counts_[i];
                out.rules.push_back(std::move(gr));
                if (out.rules.size() > options_.max_rules) explode();
            });
        }

        std::set<Term> fns;
        for (const auto& r : out.rules) {
            std::vector<const Term*> found;
            if (const Term* t = head_target(r.head)) collect_function_terms(*t, found);
            for (const auto& lit : r.body) {
                std::visit(
                    [&](const auto& p) {
                        using P = std::decay_t<decltype(p)>;
                        if constexpr (std::is_same_v<P, Comparison>) {
                            collect_function_terms(p.lhs, found);
                            collect_function_terms(p.rhs, found);
                        } else {
                            collect_function_terms(p.term, found);
                        }
                    },
                    lit.payload);
            }
            for (const Term* f : found) {
                if (f->is_flat()) fns.insert(*f);
            }
        }
        out.function_terms.assign(fns.begin(), fns.end());
        return out;
    }

private:
    const Program& program_;
    const GroundOptions& options_;
    std::vector<BindingPlan> plans_;
    std::vector<const LabelDirective*> label_directives_;
    Domains domains_;
    std::vector<std::size_t> counts_;

    [[noreturn]] void explode() const {
        std::size_t worst = static_cast<std::size_t>(std::max_element(counts_.begin(), counts_.end()) - counts_.begin());
        const Rule& r = program_.rules[worst];
        throw GroundError("grounding exceeds " + std::to_string(options_.max_rules) + " rules; largest rule " +
                          r.span.origin + ":" + std::to_string(r.span.line) + " `" + render(r) + "` has " +
                          std::to_string(counts_[worst]) + " instances");
    }

    void check_universe_size(const std::vector<Term>& universe) {
        counts_.assign(program_.rules.size(), 0);
        double total = 0;
        for (std::size_t i = 0; i < program_.rules.size(); ++i) {
            double n = 1;
            for (std::size_t k = 0; k < plans_[i].position_vars.size(); ++k) n *= static_cast<double>(universe.size());
            counts_[i] = n > 1e18 ? static_cast<std::size_t>(-1) : static_cast<std::size_t>(n);
            total += n;
        }
        if (total > static_cast<double>(options_.max_rules)) explode();
    }

    // Over-approximates the set of function terms that can ever be defined.
    void compute_domains(const std::vector<Term>& universe) {
        bool changed = true;
        std::size_t rounds = 0;
        while (changed) {
            changed = false;
            ++rounds;
            for (std::size_t i = 0; i < program_.rules.size(); ++i) {
                const Term* target = head_target(program_.rules[i].head);
                if (!target) continue;
                std::size_t produced = 0;
                Enumerator en(plans_[i], &domains_, universe);
                en.run({}, [&](const Bindings& b) {
                    if (++produced > options_.max_rules) {
                        counts_.assign(program_.rules.size(), 0);
                        counts_[i] = produced;
                        explode();
                    }
                    Term t = subst(*target, b);
                    Domain& dom = domains_[signature_of(t)];
                    if (dom.any) return;
                    if (t.is_flat()) {
                        changed |= dom.tuples.insert(t.args).second;
                    } else {
                        dom.any = true;
                        changed = true;
                    }
                });
            }
        }
    }

    GroundRule instantiate(std::size_t index, const Rule& rule, const Bindings& b, const std::vector<Term>& universe) {
        GroundRule gr;
        gr.origin = index;
        gr.span = rule.span;
        gr.body = subst(rule.body, b);
        gr.head = std::visit(
            [&](const auto& h) -> RuleHead {
                using H = std::decay_t<decltype(h)>;
                if constexpr (std::is_same_v<H, AssignHead> || std::is_same_v<H, DefaultHead>) {
                    return H{subst(h.target, b), subst(h.value, b)};
                } else if constexpr (std::is_same_v<H, AggregateHead>) {
                    return AggregateHead{subst(h.target, b), ground_aggregate(h.aggregate, b, universe)};
                } else if constexpr (std::is_same_v<H, ConstraintHead>) {
                    return h;
                } else {
                    return H{subst(h.target, b)};
                }
            },
            rule.head);
        gr.label = resolve_label(rule, gr.head, b);
        return gr;
    }

    SumAggregate ground_aggregate(const SumAggregate& agg, const Bindings& outer, const std::vector<Term>& universe) {
        SumAggregate out;
        std::set<std::string> seen;
        std::map<std::string, Term> base;
        std::set<std::string> bound;
        for (const auto& [k, v] : outer) {
            bound.insert(k);
            if (v.is_leaf()) base.emplace(k, v.leaf);
        }
        for (const auto& el : agg.elements) {
            // Substitute the outer bindings first so only local variables remain.
            AggregateElement partial{subst(el.term, outer), subst(el.conditions, outer)};
            std::vector<const Term*> occ{&partial.term};
            positive_occurrences(partial.conditions, occ);
            BindingPlan plan = plan_bindings(occ, partial.conditions, {});
            Enumerator en(plan, options_.prune ? &domains_ : nullptr, universe);
            en.run({}, [&](const Bindings& b) {
                AggregateElement g{subst(partial.term, b), subst(partial.conditions, b)};
                std::string key = to_string(g.term, true);
                for (const auto& c : g.conditions) key += "|" + render(c);
                if (seen.insert(key).second) out.elements.push_back(std::move(g));
            });
        }
        return out;
    }

    std::optional<ResolvedLabel> resolve_label(const Rule& rule, const RuleHead& ground_head, const Bindings& b) {
        if (rule.label) {
            if (const auto* text = std::get_if<TextLabel>(&*rule.label)) {
                TextTemplate tpl;
                for (auto& piece : split_label(text->text)) {
                    if (piece.variable.empty()) {
                        tpl.segments.push_back({std::move(piece.text), std::nullopt});
                    } else {
                        auto it = b.find(piece.variable);
                        if (it == b.end()) throw GroundError("label variable '" + piece.variable + "' is unbound");
                        tpl.segments.push_back({{}, it->second});
                    }
                }
                return tpl;
            }
            return subst(std::get<TermLabel>(*rule.label).term, b);
        }
        const Term* target = head_target(ground_head);
        if (!target) return std::nullopt;
        for (const LabelDirective* d : label_directives_) {
            std::map<std::string, Term> m;
            if (!match_pattern(d->pattern, *target, m)) continue;
            Bindings lb;
            for (auto& [k, v] : m) lb.emplace(k, Expression(v));
            return subst(d->label, lb);
        }
        return std::nullopt;
    }
};

std::string escape_label_text(const std::string& text) {
    std::string out;
    for (char c : text) {
        if (c == '%') out += '%';
        out += c;
    }
    return out;
}

}  // namespace

std::vector<Term> universe_of(const Program& program) {
    UniverseCollector c;
    for (const auto& r : program.rules) c.rule(r);
    return c.take();
}

GroundProgram ground(const Program& program, const GroundOptions& options) {
    return Grounder(program, options).run();
}

Program GroundProgram::to_program() const {
    Program p;
    for (const auto& gr : rules) {
        Rule r;
        r.head = gr.head;
        r.body = gr.body;
        r.span = gr.span;
        if (gr.label) {
            if (const auto* tpl = std::get_if<TextTemplate>(&*gr.label)) {
                std::string text;
                for (const auto& seg : tpl->segments) {
                    if (!seg.value) {
                        text += escape_label_text(seg.text);
                    } else if (seg.value->is_leaf() && seg.value->leaf.is_constant()) {
                        text += escape_label_text(display_constant(seg.value->leaf));
                    } else {
                        text += escape_label_text("{" + render(*seg.value) + "}");
                    }
                }
                r.label = TextLabel{std::move(text)};
            } else {
                r.label = TermLabel{std::get<Term>(*gr.label)};
            }
        }
        p.rules.push_back(std::move(r));
    }
    for (const auto& e : explain) p.directives.emplace_back(e);
    return p;
}

}  // namespace lppf
