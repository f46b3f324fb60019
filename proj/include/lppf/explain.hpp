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

#include <lppf/solve.hpp>

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lppf {

enum class ExplainMode { Default, Labeled };

struct ExplanationNode {
    std::string display;
    Term atom;
    Term value;
    std::size_t rule = 0;  // supporting ground rule
    bool labeled = false;
    bool fact = false;
    std::vector<ExplanationNode> children;

    friend bool operator==(const ExplanationNode& a, const ExplanationNode& b) {
        return a.display == b.display && a.atom == b.atom && a.value == b.value && a.labeled == b.labeled &&
               a.children == b.children;
    }
};

struct ExplanationSet {
    Term target;
    Term value;
    std::vector<ExplanationNode> alternatives;
    std::size_t omitted = 0;  // alternatives beyond the cap
};

struct ExplainOptions {
    ExplainMode mode = ExplainMode::Default;
    std::size_t max_alternatives = 32;
};

class ExplainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Assignment {
    Term term;
    Term value;
    friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// Labeled when the program carries any label.
ExplainMode default_mode(const SolveResult& result);

ExplanationSet explain(const Assignment& target, const SolveResult& result, std::size_t answer,
                       const ExplainOptions& options);

/// Targets of the program's #explain directives in one answer set, or every
/// derived assignment when there are none.
std::vector<Assignment> select_targets(const SolveResult& result, std::size_t answer);

/// Assignments matching a (possibly non-ground) pattern such as `sentence(P)=prison`.
std::vector<Assignment> select_matching(const SolveResult& result, std::size_t answer, const Term& pattern,
                                        const std::optional<Term>& value);

/// Derived (non-fact) assignments of an answer set in display order.
std::vector<Assignment> derived_assignments(const SolveResult& result, std::size_t answer);

/// Trees, each followed by a blank line, then "N ocurrences explained.".
std::string render_text(const std::vector<ExplanationSet>& sets);

std::string render_dot(const std::vector<ExplanationSet>& sets);

/// {"explanations": [{"target", "value", "alternatives": [node...], "omitted"}]}
/// where node = {"display", "atom", "value", "labeled", "fact", "children"}.
nlohmann::json to_json(const std::vector<ExplanationSet>& sets);
nlohmann::json to_json(const ExplanationNode& node);

/// `Answer:N` blocks followed by the solution count, as printed by `lppf solve`.
/// With `explanations` set, each block holds that answer's trees instead of
/// its assignments.
std::string render_answers(const SolveResult& result,
                           const std::vector<std::vector<ExplanationSet>>* explanations = nullptr);

}  // namespace lppf
