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

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace lppf {

/// A term of the lppf language.
///
/// Variables start uppercase, symbols lowercase. A function term is a functor
/// applied to argument terms; arguments may themselves be function terms, in
/// which case they are evaluated before the outer term is looked up.
struct Term {
    enum class Kind : std::uint8_t { Integer, Symbol, Text, Function, Variable };

    Kind kind = Kind::Symbol;
    std::string name;  // symbol, functor, variable name or text payload
    std::int64_t number = 0;
    std::vector<Term> args;

    static Term variable(std::string name);
    static Term symbol(std::string name);
    static Term integer(std::int64_t value);
    static Term text(std::string value);
    static Term function(std::string functor, std::vector<Term> args = {});
    static Term boolean(bool value) { return symbol(value ? "true" : "false"); }

    bool is_variable() const { return kind == Kind::Variable; }
    bool is_function() const { return kind == Kind::Function; }
    bool is_integer() const { return kind == Kind::Integer; }
    /// Integer, symbol or text.
    bool is_constant() const { return kind == Kind::Integer || kind == Kind::Symbol || kind == Kind::Text; }
    bool is_true() const { return kind == Kind::Symbol && name == "true"; }
    bool is_false() const { return kind == Kind::Symbol && name == "false"; }
    bool is_ground() const;
    /// A function term whose arguments are all constants (a valuation key).
    bool is_flat() const;

    friend bool operator==(const Term& a, const Term& b);
    friend std::strong_ordering operator<=>(const Term& a, const Term& b);
};

/// Renders a term in concrete syntax. Function terms with no arguments render
/// as `f()` unless `bare_nullary` is set (atom and head positions).
std::string to_string(const Term& term, bool bare_nullary = false);

/// Quotes a string with the escapes understood by the lexer.
std::string quote(const std::string& text);

/// Appends the variables of `term` in first-occurrence order, without duplicates.
void collect_variables(const Term& term, std::vector<std::string>& out);

/// Display ordering for output: functors alphabetically, integers numerically,
/// symbols by rank (first occurrence in the program), then by name.
class TermOrder {
public:
    TermOrder() = default;
    explicit TermOrder(const std::vector<Term>& universe);

    bool operator()(const Term& a, const Term& b) const { return compare(a, b) < 0; }
    int compare(const Term& a, const Term& b) const;

private:
    std::map<std::string, std::size_t> symbol_rank_;
};

}  // namespace lppf
