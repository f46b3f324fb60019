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

#include <lppf/term.hpp>

#include <algorithm>

namespace lppf {

Term Term::variable(std::string name) {
    Term t;
    t.kind = Kind::Variable;
    t.name = std::move(name);
    return t;
}

Term Term::symbol(std::string name) {
    Term t;
    t.kind = Kind::Symbol;
    t.name = std::move(name);
    return t;
}

Term Term::integer(std::int64_t value) {
    Term t;
    t.kind = Kind::Integer;
    t.number = value;
    return t;
}

Term Term::text(std::string value) {
    Term t;
    t.kind = Kind::Text;
    t.name = std::move(value);
    return t;
}

Term Term::function(std::string functor, std::vector<Term> args) {
    Term t;
    t.kind = Kind::Function;
    t.name = std::move(functor);
    t.args = std::move(args);
    return t;
}

bool Term::is_ground() const {
    if (kind == Kind::Variable) return false;
    return std::all_of(args.begin(), args.end(), [](const Term& a) { return a.is_ground(); });
}

bool Term::is_flat() const {
    return kind == Kind::Function &&
           std::all_of(args.begin(), args.end(), [](const Term& a) { return a.is_constant(); });
}

bool operator==(const Term& a, const Term& b) {
    return a.kind == b.kind && a.number == b.number && a.name == b.name && a.args == b.args;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
    if (auto c = a.kind <=> b.kind; c != 0) return c;
    if (auto c = a.number <=> b.number; c != 0) return c;
    if (auto c = a.name.compare(b.name); c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    if (auto c = a.args.size() <=> b.args.size(); c != 0) return c;
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (auto c = a.args[i] <=> b.args[i]; c != 0) return c;
    }
    return std::strong_ordering::equal;
}

std::string quote(const std::string& text) {
    std::string out = "\"";
    for (char c : text) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

std::string to_string(const Term& term, bool bare_nullary) {
    switch (term.kind) {
        case Term::Kind::Integer: return std::to_string(term.number);
        case Term::Kind::Symbol:
        case Term::Kind::Variable: return term.name;
        case Term::Kind::Text: return quote(term.name);
        case Term::Kind::Function: {
            if (term.args.empty()) return bare_nullary ? term.name : term.name + "()";
            std::string out = term.name + "(";
            for (std::size_t i = 0; i < term.args.size(); ++i) {
                if (i) out += ',';
                out += to_string(term.args[i], false);
            }
            return out + ")";
        }
    }
    return {};
}

void collect_variables(const Term& term, std::vector<std::string>& out) {
    if (term.is_variable()) {
        if (std::find(out.begin(), out.end(), term.name) == out.end()) out.push_back(term.name);
        return;
    }
    for (const auto& a : term.args) collect_variables(a, out);
}

TermOrder::TermOrder(const std::vector<Term>& universe) {
    for (const auto& t : universe) {
        if (t.kind == Term::Kind::Symbol) symbol_rank_.emplace(t.name, symbol_rank_.size());
    }
}

namespace {

int kind_rank(Term::Kind k) {
    switch (k) {
        case Term::Kind::Integer: return 0;
        case Term::Kind::Symbol: return 1;
        case Term::Kind::Text: return 2;
        case Term::Kind::Function: return 3;
        case Term::Kind::Variable: return 4;
    }
    return 5;
}

int sign(int v) { return (v > 0) - (v < 0); }

}  // namespace

int TermOrder::compare(const Term& a, const Term& b) const {
    if (a.kind != b.kind) return kind_rank(a.kind) < kind_rank(b.kind) ? -1 : 1;
    switch (a.kind) {
        case Term::Kind::Integer: return (a.number > b.number) - (a.number < b.number);
        case Term::Kind::Symbol: {
            auto ia = symbol_rank_.find(a.name);
            auto ib = symbol_rank_.find(b.name);
            bool ka = ia != symbol_rank_.end();
            bool kb = ib != symbol_rank_.end();
            if (ka && kb) return (ia->second > ib->second) - (ia->second < ib->second);
            if (ka != kb) return ka ? -1 : 1;
            return sign(a.name.compare(b.name));
        }
        case Term::Kind::Text:
        case Term::Kind::Variable: return sign(a.name.compare(b.name));
        case Term::Kind::Function: {
            if (int c = sign(a.name.compare(b.name))) return c;
            if (a.args.size() != b.args.size()) return a.args.size() < b.args.size() ? -1 : 1;
            for (std::size_t i = 0; i < a.args.size(); ++i) {
                if (int c = compare(a.args[i], b.args[i])) return c;
            }
            return 0;
        }
    }
    return 0;
}

}  // namespace lppf
