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

#include <lppf/ground.hpp>

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace lppf {

/// Partial map from flat ground function terms to constant values. Boolean
/// atoms are stored as `p(a) -> true` / `p(a) -> false`.
using Valuation = std::map<Term, Term>;

struct Witness {
    Term term;
    Term value;
    friend bool operator==(const Witness&, const Witness&) = default;
};

/// One rule instance that establishes a value in the answer set, with the
/// function-term values it read positively (body literals, head value,
/// aggregate contributors).
struct Support {
    std::size_t rule = 0;  // index into GroundProgram::rules
    std::vector<Witness> witnesses;
};

struct AnswerSet {
    Valuation valuation;
    std::map<Term, std::vector<Support>> supports;
    std::set<Term> facts;  // terms established by a bodiless rule
};

struct SolveResult {
    std::shared_ptr<const GroundProgram> program;
    std::vector<AnswerSet> answer_sets;
    std::vector<std::string> diagnostics;
    bool stratified = true;
};

struct SolveOptions {
    /// Guess limit for programs that are not stratified.
    std::size_t max_candidates = std::size_t{1} << 20;
};

class SolveError : public std::runtime_error {
public:
    enum class Kind { Inconsistency, ExplicitContradiction, ConstraintViolation, NonStratifiedOverflow, Evaluation };

    SolveError(Kind kind, const std::string& message, std::optional<SourceSpan> span = std::nullopt,
               std::vector<std::string> derivations = {});

    Kind kind() const { return kind_; }
    const std::optional<SourceSpan>& span() const { return span_; }
    const std::vector<std::string>& derivations() const { return derivations_; }

private:
    Kind kind_;
    std::optional<SourceSpan> span_;
    std::vector<std::string> derivations_;
};

const char* to_string(SolveError::Kind kind);

/// Value of a term: constants evaluate to themselves, function terms are
/// looked up after evaluating their arguments. nullopt when undefined.
std::optional<Term> evaluate(const Term& term, const Valuation& valuation);

/// Integer arithmetic; undefined operands or non-integer operands give
/// nullopt. Throws SolveError(Evaluation) on division by zero or overflow.
std::optional<Term> evaluate(const Expression& expr, const Valuation& valuation);

/// The flat key a function term refers to (arguments evaluated).
std::optional<Term> resolve(const Term& term, const Valuation& valuation);

/// Whether a literal holds. Literals over undefined values are false, so
/// their default negation is true.
bool holds(const BodyLiteral& literal, const Valuation& valuation);

/// Total order on constants used by comparisons: integers, then symbols,
/// then strings.
int compare_values(const Term& a, const Term& b);

SolveResult solve(std::shared_ptr<const GroundProgram> program, const SolveOptions& options = {});
SolveResult solve(GroundProgram program, const SolveOptions& options = {});

/// Least model of the program reduct with respect to `candidate`, or nullopt
/// when the reduct derives two values for one term.
std::optional<Valuation> least_model(const GroundProgram& program, const Valuation& candidate);

/// True iff `candidate` equals the least model of its reduct and satisfies
/// every integrity constraint.
bool check_stable(const GroundProgram& program, const Valuation& candidate);

/// Canonical one-line text of a valuation, used to order answer sets.
std::string canonical_text(const Valuation& valuation);

/// `p(a).`, `~p(a).` or `f(a)=v.`
std::string render_assignment(const Term& term, const Term& value);

/// Text of a ground rule without its label, e.g. `sentence(clare) ^= innocent :- person(clare).`
std::string render_ground_rule(const GroundRule& rule);

}  // namespace lppf
