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

#include <liver/classifier.hpp>

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace liver {

struct ReportFilter {
    std::optional<std::string> risk;
    std::optional<std::int64_t> min_score;  // on the SOFT score
    std::optional<std::int64_t> max_score;
    std::optional<std::string> rule;  // activated rule id

    /// `score` is a CaseScore document.
    bool matches(const nlohmann::json& score) const;
};

/// Run document: run_id, classifier_id, classifier_version, dataset_id,
/// created, scores (CaseScore), explanations ({case_id, explanations, text}),
/// failures ({case_id, error}) and the batch text.
nlohmann::json make_run(const Classifier& classifier, const std::string& dataset_id,
                        const std::vector<CaseResult>& results, const std::string& created);

/// Self-contained HTML: inline styles, one section per matching case with
/// its text tree and an inline SVG graph.
std::string render_report(const nlohmann::json& run, const ReportFilter& filter = {});

/// Inline SVG drawing of one explanation tree document (lppf::to_json(node)).
std::string tree_svg(const nlohmann::json& node);

std::string html_escape(const std::string& text);

}  // namespace liver
