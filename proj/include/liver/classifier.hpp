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

#include <liver/records.hpp>
#include <lppf/explain.hpp>

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace liver {

enum class Phase { Psoft, Soft };

const char* to_string(Phase phase);

struct Condition {
    std::string attribute;
    lppf::CompareOp comparator = lppf::CompareOp::Eq;
    Value operand;
    friend bool operator==(const Condition&, const Condition&) = default;
};

struct ClassifierRule {
    std::string id;
    std::string label;
    std::int64_t value = 0;
    Phase phase = Phase::Soft;
    std::vector<Condition> conditions;
    friend bool operator==(const ClassifierRule&, const ClassifierRule&) = default;
};

/// Inclusive score interval. The lowest band also takes every score below
/// it and the highest band every score above it; `max` is unset for an
/// open-ended top band.
struct RiskBand {
    std::string name;
    std::int64_t min = 0;
    std::optional<std::int64_t> max;
    friend bool operator==(const RiskBand&, const RiskBand&) = default;
};

struct Classifier {
    std::string id;
    std::string name;
    std::string description;
    std::vector<ClassifierRule> rules;
    std::vector<RiskBand> bands;
    std::int64_t version = 1;
    std::string created;
    std::string modified;
    friend bool operator==(const Classifier&, const Classifier&) = default;
};

struct Finding {
    std::string severity;  // "error" or "warning"
    std::string code;      // e.g. band_gap, unknown_attribute
    std::string message;
    std::string rule;  // offending rule id, if any
    int condition = -1;
};

class ClassifierError : public std::runtime_error {
public:
    explicit ClassifierError(const std::string& message, std::vector<Finding> findings = {})
        : std::runtime_error(message), findings_(std::move(findings)) {}
    const std::vector<Finding>& findings() const { return findings_; }

private:
    std::vector<Finding> findings_;
};

std::vector<RiskBand> default_bands();

/// A subset of the SOFT categories and weights, with the three
/// pretransplant conditions in the P-SOFT phase.
Classifier soft_fragment();

bool is_slug(const std::string& s);

std::vector<Finding> validate(const Classifier& classifier, const Schema& schema);
bool has_errors(const std::vector<Finding>& findings);

/// The classifier as an lppf program over `case(P)` facts. Throws
/// ClassifierError when validation reports errors.
lppf::Program compile(const Classifier& classifier, const Schema& schema);

/// Rule-editor form of one rule: `"label" :: rule(P):=v :- conditions.`
std::string preview(const ClassifierRule& rule);

Classifier clone(const Classifier& source, const std::string& new_id, const std::string& new_name,
                 const std::string& now);

nlohmann::json to_json(const Classifier& classifier);
Classifier classifier_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const Finding& finding);
nlohmann::json to_json(const std::vector<Finding>& findings);

struct ActivatedRule {
    std::string id;
    std::int64_t weight = 0;
    Phase phase = Phase::Soft;
    friend bool operator==(const ActivatedRule&, const ActivatedRule&) = default;
};

struct CaseScore {
    std::int64_t case_id = 0;
    std::int64_t psoft_score = 0;
    std::int64_t soft_score = 0;
    std::string risk;
    std::vector<ActivatedRule> activated;
    friend bool operator==(const CaseScore&, const CaseScore&) = default;
};

struct CaseResult {
    CaseScore score;
    std::vector<lppf::ExplanationSet> explanations;
    std::optional<std::string> error;  // solver diagnostic when the case failed
};

/// Solves the compiled classifier with each record's facts and extracts
/// scores and labeled explanations. Failed cases carry their diagnostic.
std::vector<CaseResult> score_cases(const Classifier& classifier, const Schema& schema,
                                    const std::vector<TransplantRecord>& records);

CaseResult score_case(const Classifier& classifier, const Schema& schema, const TransplantRecord& record);

/// `Answer:1`, every case's trees, "N ocurrences explained." and "1 solution".
std::string render_batch(const std::vector<CaseResult>& results);

nlohmann::json to_json(const CaseScore& score);
nlohmann::json to_json(const CaseResult& result);

}  // namespace liver
