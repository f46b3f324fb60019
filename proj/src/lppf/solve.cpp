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

#include <lppf/solve.hpp>

#include <lppf/render.hpp>

#include <algorithm>
#include <functional>

namespace lppf {

SolveError::SolveError(Kind kind, const std::string& message, std::optional<SourceSpan> span,
                       std::vector<std::string> derivations)
    : std::runtime_error(message), kind_(kind), span_(std::move(span)), derivations_(std::move(derivations)) {}

const char* to_string(SolveError::Kind kind) {
    switch (kind) {
        case SolveError::Kind::Inconsistency: return "inconsistency";
        case SolveError::Kind::ExplicitContradiction: return "explicit contradiction";
        case SolveError::Kind::ConstraintViolation: return "constraint violation";
        case SolveError::Kind::NonStratifiedOverflow: return "non-stratified overflow";
        case SolveError::Kind::Evaluation: return "evaluation error";
    }
    return "error";
}

// ---- evaluation -----------------------------------------------------------

std::optional<Term> resolve(const Term& term, const Valuation& valuation) {
    if (term.is_flat()) return term;
    Term key = term;
    for (auto& a : key.args) {
        if (a.is_constant()) continue;
        auto v = evaluate(a, valuation);
        if (!v) return std::nullopt;
        a = std::move(*v);
    }
    return key;
}

std::optional<Term> evaluate(const Term& term, const Valuation& valuation) {
    if (term.is_constant()) return term;
    if (!term.is_function()) return std::nullopt;
    auto key = resolve(term, valuation);
    if (!key) return std::nullopt;
    auto it = valuation.find(*key);
    if (it == valuation.end()) return std::nullopt;
    return it->second;
}

std::optional<Term> evaluate(const Expression& expr, const Valuation& valuation) {
    if (expr.is_leaf()) return evaluate(expr.leaf, valuation);
    auto l = evaluate(expr.operands[0], valuation);
    auto r = evaluate(expr.operands[1], valuation);
    if (!l || !r || !l->is_integer() || !r->is_integer()) return std::nullopt;
    std::int64_t a = l->number;
    std::int64_t b = r->number;
    std::int64_t out = 0;
    bool overflow = false;
    switch (expr.op) {
        case ArithOp::Add: overflow = __builtin_add_overflow(a, b, &out); break;
        case ArithOp::Sub: overflow = __builtin_sub_overflow(a, b, &out); break;
        case ArithOp::Mul: overflow = __builtin_mul_overflow(a, b, &out); break;
        case ArithOp::Div:
            if (b == 0) throw SolveError(SolveError::Kind::Evaluation, "division by zero in " + render(expr));
            overflow = a == INT64_MIN && b == -1;
            if (!overflow) out = a / b;
            break;
    }
    if (overflow) throw SolveError(SolveError::Kind::Evaluation, "integer overflow in " + render(expr));
    return Term::integer(out);
}

int compare_values(const Term& a, const Term& b) {
    auto rank = [](const Term& t) {
        switch (t.kind) {
            case Term::Kind::Integer: return 0;
            case Term::Kind::Symbol: return 1;
            case Term::Kind::Text: return 2;
            default: return 3;
        }
    };
    if (rank(a) != rank(b)) return rank(a) < rank(b) ? -1 : 1;
    if (a.is_integer()) return (a.number > b.number) - (a.number < b.number);
    int c = a.name.compare(b.name);
    return (c > 0) - (c < 0);
}

namespace {

bool holds_positively(const BodyLiteral& literal, const Valuation& valuation) {
    return std::visit(
        [&](const auto& p) -> bool {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, PositiveAtom>) {
                auto v = evaluate(p.term, valuation);
                return v && v->is_true();
            } else if constexpr (std::is_same_v<P, NegativeAtom>) {
                auto v = evaluate(p.term, valuation);
                return v && v->is_false();
            } else {
                auto l = evaluate(p.lhs, valuation);
                if (!l) return false;
                auto r = evaluate(p.rhs, valuation);
                if (!r) return false;
                switch (p.op) {
                    case CompareOp::Eq: return *l == *r;
                    case CompareOp::Ne: return !(*l == *r);
                    case CompareOp::Lt: return compare_values(*l, *r) < 0;
                    case CompareOp::Le: return compare_values(*l, *r) <= 0;
                    case CompareOp::Gt: return compare_values(*l, *r) > 0;
                    case CompareOp::Ge: return compare_values(*l, *r) >= 0;
                }
                return false;
            }
        },
        literal.payload);
}

}  // namespace

bool holds(const BodyLiteral& literal, const Valuation& valuation) {
    bool v = holds_positively(literal, valuation);
    return literal.default_negated ? !v : v;
}

std::string render_assignment(const Term& term, const Term& value) {
    if (value.is_true()) return to_string(term, true) + ".";
    if (value.is_false()) return "~" + to_string(term, true) + ".";
    return to_string(term, true) + "=" + to_string(value) + ".";
}

std::string render_ground_rule(const GroundRule& rule) { return render(Rule{std::nullopt, rule.head, rule.body, {}}); }

std::string canonical_text(const Valuation& valuation) {
    std::string out;
    for (const auto& [k, v] : valuation) {
        if (!out.empty()) out += ' ';
        out += render_assignment(k, v);
    }
    return out;
}

namespace {

// ---- rule application -------------------------------------------------------

struct Firing {
    Term key;
    Term value;
};

bool body_holds(const GroundRule& rule, const Valuation& pos, const Valuation& neg) {
    for (const auto& lit : rule.body) {
        if (lit.default_negated) {
            if (holds_positively(lit, neg)) return false;
        } else if (!holds_positively(lit, pos)) {
            return false;
        }
    }
    return true;
}

std::optional<Term> aggregate_sum(const SumAggregate& agg, const Valuation& view,
                                  std::vector<Witness>* contributors = nullptr) {
    std::int64_t total = 0;
    std::set<Term> counted;
    for (const auto& el : agg.elements) {
        bool ok = std::all_of(el.conditions.begin(), el.conditions.end(),
                              [&](const BodyLiteral& c) { return holds(c, view); });
        if (!ok) continue;
        std::optional<Term> value;
        if (el.term.is_function()) {
            auto key = resolve(el.term, view);
            if (!key || !counted.insert(*key).second) continue;
            auto it = view.find(*key);
            if (it == view.end()) continue;
            value = it->second;
            if (contributors) contributors->push_back({*key, *value});
        } else {
            value = el.term;
        }
        if (!value->is_integer()) {
            throw SolveError(SolveError::Kind::Evaluation, "non-integer value " + to_string(*value) + " in #sum");
        }
        if (__builtin_add_overflow(total, value->number, &total)) {
            throw SolveError(SolveError::Kind::Evaluation, "integer overflow in #sum");
        }
    }
    return Term::integer(total);
}

// Head key and value if the rule's body holds. Default-negated literals and
// aggregates are read from `neg`, everything else from `pos`.
std::optional<Firing> fire(const GroundRule& rule, const Valuation& pos, const Valuation& neg) {
    try {
        if (!body_holds(rule, pos, neg)) return std::nullopt;
        const Term* target = head_target(rule.head);
        if (!target) return std::nullopt;
        auto key = resolve(*target, pos);
        if (!key) return std::nullopt;
        std::optional<Term> value = std::visit(
            [&](const auto& h) -> std::optional<Term> {
                using H = std::decay_t<decltype(h)>;
                if constexpr (std::is_same_v<H, AssertHead>) {
                    return Term::boolean(true);
                } else if constexpr (std::is_same_v<H, DenyHead>) {
                    return Term::boolean(false);
                } else if constexpr (std::is_same_v<H, AssignHead> || std::is_same_v<H, DefaultHead>) {
                    return evaluate(h.value, pos);
                } else if constexpr (std::is_same_v<H, AggregateHead>) {
                    return aggregate_sum(h.aggregate, neg);
                } else {
                    return std::nullopt;
                }
            },
            rule.head);
        if (!value) return std::nullopt;
        return Firing{std::move(*key), std::move(*value)};
    } catch (const SolveError& e) {
        if (e.kind() != SolveError::Kind::Evaluation || e.span()) throw;
        throw SolveError(e.kind(), e.what(), rule.span, {render_ground_rule(rule)});
    }
}

bool is_default(const GroundRule& rule) { return std::holds_alternative<DefaultHead>(rule.head); }

std::string where(const GroundRule& rule) {
    return render_ground_rule(rule) + "  [" + rule.span.origin + ":" + std::to_string(rule.span.line) + "]";
}

// ---- dependency analysis ----------------------------------------------------

using Signature = std::pair<std::string, std::size_t>;

struct Reads {
    std::vector<const Term*> positive;
    std::vector<const Term*> negative;
};

void reads_of_literals(const std::vector<BodyLiteral>& lits, Reads& out, bool force_negative = false) {
    for (const auto& lit : lits) {
        auto& dst = (lit.default_negated || force_negative) ? out.negative : out.positive;
        std::visit(
            [&](const auto& p) {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, Comparison>) {
                    collect_function_terms(p.lhs, dst);
                    collect_function_terms(p.rhs, dst);
                } else {
                    collect_function_terms(p.term, dst);
                }
            },
            lit.payload);
    }
}

Reads reads_of(const GroundRule& rule) {
    Reads r;
    reads_of_literals(rule.body, r);
    if (const Term* target = head_target(rule.head)) {
        for (const auto& a : target->args) collect_function_terms(a, r.positive);
    }
    std::visit(
        [&](const auto& h) {
            using H = std::decay_t<decltype(h)>;
            if constexpr (std::is_same_v<H, AssignHead> || std::is_same_v<H, DefaultHead>) {
                collect_function_terms(h.value, r.positive);
            } else if constexpr (std::is_same_v<H, AggregateHead>) {
                for (const auto& el : h.aggregate.elements) {
                    collect_function_terms(el.term, r.negative);
                    reads_of_literals(el.conditions, r, true);
                }
            }
        },
        rule.head);
    return r;
}

// Function-term level dependency graph. Each node (a flat term, or a whole
// functor when its terms are addressed through nested arguments) has an
// explicit vertex 2n and a final vertex 2n+1.
class DependencyGraph {
public:
    explicit DependencyGraph(const GroundProgram& program) : program_(program) {
        for (const auto& rule : program.rules) {
            if (const Term* t = head_target(rule.head); t && !t->is_flat()) collapsed_.insert(signature(*t));
            Reads r = reads_of(rule);
            for (auto* list : {&r.positive, &r.negative}) {
                for (const Term* t : *list) {
                    if (!t->is_flat()) collapsed_.insert(signature(*t));
                }
            }
        }
        for (const auto& rule : program.rules) {
            if (const Term* t = head_target(rule.head)) node(*t);
        }
        has_default_.assign(nodes_, false);
        std::vector<std::vector<const GroundRule*>> defaults(nodes_);
        for (const auto& rule : program.rules) {
            if (is_default(rule)) {
                int n = node(*head_target(rule.head));
                has_default_[n] = true;
                defaults[n].push_back(&rule);
            }
        }
        adjacency_.resize(2 * nodes_);
        rules_by_vertex_.resize(2 * nodes_);
        for (std::size_t i = 0; i < program.rules.size(); ++i) {
            const GroundRule& rule = program.rules[i];
            const Term* target = head_target(rule.head);
            if (!target) continue;
            int v = head_vertex(rule);
            rules_by_vertex_[v].push_back(i);
            Reads r = reads_of(rule);
            for (const Term* t : r.positive) edge(v, final_vertex(*t), false);
            for (const Term* t : r.negative) edge(v, final_vertex(*t), true);
        }
        for (int n = 0; n < nodes_; ++n) {
            edge(2 * n + 1, 2 * n, has_default_[n]);
            const auto& ds = defaults[n];
            for (std::size_t k = 1; k < ds.size(); ++k) {
                const auto& a = std::get<DefaultHead>(ds[0]->head);
                const auto& b = std::get<DefaultHead>(ds[k]->head);
                if (!(a.value == b.value) || !(a.target == b.target)) {
                    edge(2 * n + 1, 2 * n + 1, true);
                    break;
                }
            }
        }
        compute_components();
    }

    int node_count() const { return nodes_; }
    bool stratified() const { return stratified_; }
    const std::vector<std::vector<int>>& components() const { return components_; }
    const std::vector<std::size_t>& rules_of(int vertex) const { return rules_by_vertex_[vertex]; }
    bool has_default(int n) const { return has_default_[n]; }
    bool has_dynamic_heads() const {
        return std::any_of(program_.rules.begin(), program_.rules.end(), [](const GroundRule& r) {
            const Term* t = head_target(r.head);
            return t && !t->is_flat();
        });
    }

    /// Node of a flat key; -1 when no rule can define it.
    int node_of_key(const Term& key) const {
        auto sig = signature(key);
        if (collapsed_.count(sig)) {
            auto it = groups_.find(sig);
            return it == groups_.end() ? -1 : it->second;
        }
        auto it = terms_.find(key);
        return it == terms_.end() ? -1 : it->second;
    }

private:
    const GroundProgram& program_;
    std::set<Signature> collapsed_;
    std::map<Signature, int> groups_;
    std::map<Term, int> terms_;
    int nodes_ = 0;
    std::vector<bool> has_default_;
    std::vector<std::vector<std::pair<int, bool>>> adjacency_;
    std::vector<std::vector<std::size_t>> rules_by_vertex_;
    std::vector<std::vector<int>> components_;
    bool stratified_ = true;

    static Signature signature(const Term& t) { return {t.name, t.args.size()}; }

    int node(const Term& t) {
        auto sig = signature(t);
        if (collapsed_.count(sig)) {
            auto [it, added] = groups_.emplace(sig, nodes_);
            if (added) ++nodes_;
            return it->second;
        }
        auto [it, added] = terms_.emplace(t, nodes_);
        if (added) ++nodes_;
        return it->second;
    }

    int head_vertex(const GroundRule& rule) {
        int n = node(*head_target(rule.head));
        return is_default(rule) ? 2 * n + 1 : 2 * n;
    }

    // Reads of terms that no rule defines need no vertex.
    int final_vertex(const Term& t) const {
        auto sig = signature(t);
        if (collapsed_.count(sig)) {
            auto it = groups_.find(sig);
            return it == groups_.end() ? -1 : 2 * it->second + 1;
        }
        auto it = terms_.find(t);
        return it == terms_.end() ? -1 : 2 * it->second + 1;
    }

    void edge(int from, int to, bool negative) {
        if (to < 0) return;
        adjacency_[from].emplace_back(to, negative);
    }

    // Tarjan's algorithm, iterative. Components come out dependencies-first.
    void compute_components() {
        int n = static_cast<int>(adjacency_.size());
        std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
        std::vector<bool> on_stack(n, false);
        std::vector<int> stack;
        int counter = 0;
        struct Frame {
            int v;
            std::size_t next;
        };
        for (int root = 0; root < n; ++root) {
            if (index[root] >= 0) continue;
            std::vector<Frame> call{{root, 0}};
            index[root] = low[root] = counter++;
            stack.push_back(root);
            on_stack[root] = true;
            while (!call.empty()) {
                Frame& f = call.back();
                if (f.next < adjacency_[f.v].size()) {
                    int w = adjacency_[f.v][f.next++].first;
                    if (index[w] < 0) {
                        index[w] = low[w] = counter++;
                        stack.push_back(w);
                        on_stack[w] = true;
                        call.push_back({w, 0});
                    } else if (on_stack[w]) {
                        low[f.v] = std::min(low[f.v], index[w]);
                    }
                    continue;
                }
                int v = f.v;
                call.pop_back();
                if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
                if (low[v] == index[v]) {
                    std::vector<int> component;
                    int w = -1;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp[w] = static_cast<int>(components_.size());
                        component.push_back(w);
                    } while (w != v);
                    components_.push_back(std::move(component));
                }
            }
        }
        for (int v = 0; v < n; ++v) {
            for (auto [w, negative] : adjacency_[v]) {
                if (negative && comp[v] == comp[w]) stratified_ = false;
            }
        }
    }
};

// ---- support extraction -----------------------------------------------------

void add_witnesses(const std::vector<const Term*>& terms, const Valuation& v, std::vector<Witness>& out) {
    for (const Term* t : terms) {
        auto key = resolve(*t, v);
        if (!key) continue;
        auto it = v.find(*key);
        if (it == v.end()) continue;
        Witness w{*key, it->second};
        if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(std::move(w));
    }
}

std::vector<Witness> witnesses_of(const GroundRule& rule, const Valuation& v) {
    std::vector<Witness> out;
    Reads body;
    reads_of_literals(rule.body, body);
    add_witnesses(body.positive, v, out);
    std::vector<const Term*> head_reads;
    if (const Term* target = head_target(rule.head)) {
        for (const auto& a : target->args) collect_function_terms(a, head_reads);
    }
    std::visit(
        [&](const auto& h) {
            using H = std::decay_t<decltype(h)>;
            if constexpr (std::is_same_v<H, AssignHead> || std::is_same_v<H, DefaultHead>) {
                collect_function_terms(h.value, head_reads);
            }
        },
        rule.head);
    add_witnesses(head_reads, v, out);
    if (const auto* agg = std::get_if<AggregateHead>(&rule.head)) {
        std::set<Term> counted;
        for (const auto& el : agg->aggregate.elements) {
            bool ok = std::all_of(el.conditions.begin(), el.conditions.end(),
                                  [&](const BodyLiteral& c) { return holds(c, v); });
            if (!ok || !el.term.is_function()) continue;
            auto key = resolve(el.term, v);
            if (!key || !v.count(*key) || !counted.insert(*key).second) continue;
            std::vector<const Term*> reads;
            collect_function_terms(el.term, reads);
            Reads cond;
            reads_of_literals(el.conditions, cond);
            reads.insert(reads.end(), cond.positive.begin(), cond.positive.end());
            add_witnesses(reads, v, out);
        }
    }
    return out;
}

AnswerSet make_answer_set(const GroundProgram& program, Valuation v) {
    AnswerSet as;
    for (std::size_t i = 0; i < program.rules.size(); ++i) {
        const GroundRule& rule = program.rules[i];
        auto f = fire(rule, v, v);
        if (!f) continue;
        auto it = v.find(f->key);
        if (it == v.end() || !(it->second == f->value)) continue;
        as.supports[f->key].push_back({i, witnesses_of(rule, v)});
        if (rule.body.empty()) as.facts.insert(f->key);
    }
    as.valuation = std::move(v);
    return as;
}

const GroundRule* violated_constraint(const GroundProgram& program, const Valuation& v) {
    for (const auto& rule : program.rules) {
        if (std::holds_alternative<ConstraintHead>(rule.head) && body_holds(rule, v, v)) return &rule;
    }
    return nullptr;
}

[[noreturn]] void conflict(const Term& key, const Term& a, const GroundRule& ra, const Term& b, const GroundRule& rb) {
    bool boolean = (a.is_true() && b.is_false()) || (a.is_false() && b.is_true());
    auto kind = boolean ? SolveError::Kind::ExplicitContradiction : SolveError::Kind::Inconsistency;
    std::string msg = boolean ? "both " + to_string(key, true) + " and ~" + to_string(key, true) + " are derived"
                              : "conflicting values " + to_string(a) + " and " + to_string(b) + " for " +
                                    to_string(key, true);
    throw SolveError(kind, msg, ra.span, {where(ra), where(rb)});
}

// ---- stratified evaluation --------------------------------------------------

class StratifiedEvaluator {
public:
    StratifiedEvaluator(const GroundProgram& program, const DependencyGraph& graph) : program_(program), graph_(graph) {}

    Valuation run() {
        for (const auto& component : graph_.components()) {
            for (int vertex : component) {
                if (vertex % 2 == 1 && graph_.has_default(vertex / 2)) publish_explicit(vertex / 2);
            }
            std::vector<std::size_t> rules;
            for (int vertex : component) {
                const auto& rs = graph_.rules_of(vertex);
                rules.insert(rules.end(), rs.begin(), rs.end());
            }
            if (rules.empty()) continue;
            bool changed = true;
            while (changed) {
                changed = false;
                for (std::size_t i : rules) changed |= apply(i);
            }
        }
        return std::move(final_);
    }

private:
    const GroundProgram& program_;
    const DependencyGraph& graph_;
    Valuation final_;
    Valuation explicit_;  // explicit values of terms that also have defaults
    std::map<Term, std::size_t> final_by_;
    std::map<Term, std::size_t> explicit_by_;

    void publish_explicit(int node) {
        for (const auto& [key, value] : explicit_) {
            if (graph_.node_of_key(key) == node && !final_.count(key)) {
                final_.emplace(key, value);
                final_by_.emplace(key, explicit_by_.at(key));
            }
        }
    }

    bool apply(std::size_t index) {
        const GroundRule& rule = program_.rules[index];
        auto f = fire(rule, final_, final_);
        if (!f) return false;
        int node = graph_.node_of_key(f->key);
        if (is_default(rule)) {
            auto x = explicit_.find(f->key);
            if (x != explicit_.end() && !(x->second == f->value)) return false;
            return store(final_, final_by_, *f, index);
        }
        if (node >= 0 && graph_.has_default(node)) return store(explicit_, explicit_by_, *f, index);
        return store(final_, final_by_, *f, index);
    }

    bool store(Valuation& target, std::map<Term, std::size_t>& by, const Firing& f, std::size_t index) {
        auto it = target.find(f.key);
        if (it == target.end()) {
            target.emplace(f.key, f.value);
            by.emplace(f.key, index);
            return true;
        }
        if (it->second == f.value) return false;
        std::size_t other = by.at(f.key);
        conflict(f.key, it->second, program_.rules[other], f.value, program_.rules[index]);
    }
};

// ---- least model of a reduct --------------------------------------------------

// Least model of the reduct relative to `guess`: default negation, default
// override and aggregates read `guess`; positive reads use the model being
// built. nullopt when two values are derived for one term.
std::optional<Valuation> reduct_model(const GroundProgram& program, const Valuation& guess) {
    Valuation model;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& rule : program.rules) {
            auto f = fire(rule, model, guess);
            if (!f) continue;
            if (is_default(rule)) {
                auto g = guess.find(f->key);
                if (g != guess.end() && !(g->second == f->value)) continue;
            }
            auto it = model.find(f->key);
            if (it == model.end()) {
                model.emplace(std::move(f->key), std::move(f->value));
                changed = true;
            } else if (!(it->second == f->value)) {
                return std::nullopt;
            }
        }
    }
    return model;
}

// ---- guess and check ------------------------------------------------------------

class GuessAndCheck {
public:
    GuessAndCheck(const GroundProgram& program, const DependencyGraph& graph, const SolveOptions& options)
        : program_(program), graph_(graph), options_(options) {}

    std::vector<Valuation> run(std::vector<std::string>& diagnostics) {
        if (graph_.has_dynamic_heads()) overflow("nested head terms in a non-stratified program");
        collect_guessed();
        compute_pools();

        std::vector<std::vector<Term>> choices;
        double total = 1;
        for (const auto& t : guessed_) {
            const auto& pool = pools_[t];
            choices.emplace_back(pool.begin(), pool.end());
            total *= static_cast<double>(pool.size() + 1);
        }
        if (total > static_cast<double>(options_.max_candidates)) {
            overflow("program is not stratified and needs " + std::to_string(static_cast<long long>(total)) +
                     " candidates (limit " + std::to_string(options_.max_candidates) + ")");
        }

        std::vector<Valuation> models;
        std::vector<std::size_t> digit(guessed_.size(), 0);
        std::size_t rejected_constraint = 0;
        while (true) {
            Valuation guess;
            for (std::size_t i = 0; i < guessed_.size(); ++i) {
                if (digit[i] > 0) guess.emplace(guessed_[i], choices[i][digit[i] - 1]);
            }
            if (auto m = reduct_model(program_, guess); m && agrees(*m, guess)) {
                if (violated_constraint(program_, *m)) {
                    ++rejected_constraint;
                } else {
                    models.push_back(std::move(*m));
                }
            }
            std::size_t i = 0;
            while (i < digit.size() && ++digit[i] > choices[i].size()) digit[i++] = 0;
            if (i == digit.size()) break;
        }
        if (models.empty()) {
            diagnostics.push_back("no stable model");
            if (rejected_constraint) {
                diagnostics.push_back(std::to_string(rejected_constraint) + " candidate(s) violate integrity constraints");
            }
        }
        return models;
    }

private:
    const GroundProgram& program_;
    const DependencyGraph& graph_;
    const SolveOptions& options_;
    std::vector<Term> guessed_;
    std::map<Term, std::set<Term>> pools_;

    [[noreturn]] static void overflow(const std::string& what) {
        throw SolveError(SolveError::Kind::NonStratifiedOverflow, what);
    }

    void guess(const Term& t) {
        if (!t.is_flat()) overflow("nested term " + to_string(t) + " is read negatively in a non-stratified program");
        if (std::find(guessed_.begin(), guessed_.end(), t) == guessed_.end()) guessed_.push_back(t);
    }

    void collect_guessed() {
        for (const auto& rule : program_.rules) {
            Reads r = reads_of(rule);
            for (const Term* t : r.negative) guess(*t);
            if (is_default(rule)) guess(*head_target(rule.head));
        }
        for (const auto& rule : program_.rules) {
            if (!std::holds_alternative<AggregateHead>(rule.head)) continue;
            const Term& t = *head_target(rule.head);
            if (std::find(guessed_.begin(), guessed_.end(), t) != guessed_.end()) {
                overflow("#sum result " + to_string(t, true) + " is read negatively in a non-stratified program");
            }
        }
        std::sort(guessed_.begin(), guessed_.end());
    }

    bool agrees(const Valuation& model, const Valuation& guess) const {
        for (const auto& t : guessed_) {
            auto m = model.find(t);
            auto g = guess.find(t);
            bool md = m != model.end();
            bool gd = g != guess.end();
            if (md != gd || (md && !(m->second == g->second))) return false;
        }
        return true;
    }

    // Possible values of every term: the closure of head values over the
    // values possible for the terms they read.
    void compute_pools() {
        constexpr std::size_t kPoolLimit = 256;
        bool changed = true;
        int rounds = 0;
        while (changed) {
            changed = false;
            if (++rounds > 64) overflow("value domains do not converge");
            for (const auto& rule : program_.rules) {
                const Term* target = head_target(rule.head);
                if (!target || std::holds_alternative<AggregateHead>(rule.head)) continue;
                std::set<Term> values;
                std::visit(
                    [&](const auto& h) {
                        using H = std::decay_t<decltype(h)>;
                        if constexpr (std::is_same_v<H, AssertHead>) {
                            values.insert(Term::boolean(true));
                        } else if constexpr (std::is_same_v<H, DenyHead>) {
                            values.insert(Term::boolean(false));
                        } else if constexpr (std::is_same_v<H, AssignHead> || std::is_same_v<H, DefaultHead>) {
                            values = possible(h.value);
                        }
                    },
                    rule.head);
                auto& pool = pools_[*target];
                for (const auto& v : values) changed |= pool.insert(v).second;
                if (pool.size() > kPoolLimit) overflow("too many possible values for " + to_string(*target, true));
            }
        }
    }

    std::set<Term> possible(const Expression& e) {
        if (e.is_leaf()) {
            if (e.leaf.is_constant()) return {e.leaf};
            if (!e.leaf.is_flat()) overflow("nested term in a non-stratified program");
            auto it = pools_.find(e.leaf);
            return it == pools_.end() ? std::set<Term>{} : it->second;
        }
        std::set<Term> out;
        auto ls = possible(e.operands[0]);
        auto rs = possible(e.operands[1]);
        for (const auto& l : ls) {
            for (const auto& r : rs) {
                Valuation none;
                try {
                    auto v = evaluate(Expression::binary(e.op, Expression(l), Expression(r)), none);
                    if (v) out.insert(*v);
                } catch (const SolveError&) {
                    // Division by zero in one combination: not a possible value.
                }
            }
        }
        return out;
    }
};

}  // namespace

std::optional<Valuation> least_model(const GroundProgram& program, const Valuation& candidate) {
    return reduct_model(program, candidate);
}

bool check_stable(const GroundProgram& program, const Valuation& candidate) {
    std::optional<Valuation> m;
    try {
        m = reduct_model(program, candidate);
    } catch (const SolveError&) {
        return false;
    }
    return m && *m == candidate && !violated_constraint(program, candidate);
}

SolveResult solve(GroundProgram program, const SolveOptions& options) {
    return solve(std::make_shared<const GroundProgram>(std::move(program)), options);
}

SolveResult solve(std::shared_ptr<const GroundProgram> program, const SolveOptions& options) {
    SolveResult result;
    result.program = program;
    DependencyGraph graph(*program);
    result.stratified = graph.stratified();

    std::vector<Valuation> models;
    if (graph.stratified()) {
        Valuation v = StratifiedEvaluator(*program, graph).run();
        if (const GroundRule* c = violated_constraint(*program, v)) {
            throw SolveError(SolveError::Kind::ConstraintViolation, "integrity constraint violated: " + render_ground_rule(*c),
                             c->span, {where(*c)});
        }
        models.push_back(std::move(v));
    } else {
        result.diagnostics.push_back("program is not stratified; enumerating candidate models");
        models = GuessAndCheck(*program, graph, options).run(result.diagnostics);
    }

    std::vector<std::pair<std::string, Valuation>> keyed;
    for (auto& m : models) keyed.emplace_back(canonical_text(m), std::move(m));
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    keyed.erase(std::unique(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first == b.first; }),
                keyed.end());
    for (auto& [text, v] : keyed) result.answer_sets.push_back(make_answer_set(*program, std::move(v)));
    return result;
}

}  // namespace lppf
