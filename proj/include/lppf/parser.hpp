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

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lppf {

struct Diagnostic {
    std::string origin;
    int line = 0;
    int column = 0;
    std::string message;

    /// `origin:line:col: message`
    std::string format() const;
};

struct ParseResult {
    Program program;
    std::vector<Diagnostic> errors;

    bool ok() const { return errors.empty(); }
};

class ParseError : public std::runtime_error {
public:
    explicit ParseError(std::vector<Diagnostic> errors);
    const std::vector<Diagnostic>& errors() const { return errors_; }

private:
    std::vector<Diagnostic> errors_;
};

/// Parses `.lppf` source. Statements with errors are skipped and reported;
/// parsing continues at the next statement.
ParseResult parse(std::string_view source, const std::string& origin = "<input>");

/// Like parse(), but throws ParseError when any diagnostic was produced.
Program parse_or_throw(std::string_view source, const std::string& origin = "<input>");

/// Parses a single ground-or-not function term, optionally followed by
/// `= value`; used for command-line queries such as `sentence(gabriel)=prison`.
/// Returns the term and the value (true for bare atoms, false for `~p`).
std::pair<Term, Term> parse_assignment(std::string_view text);

/// Text label placeholders: `%Var` names a rule variable, `%%` is a literal '%'.
struct LabelPiece {
    std::string text;
    std::string variable;  // empty for literal pieces
};
std::vector<LabelPiece> split_label(const std::string& label);

}  // namespace lppf
