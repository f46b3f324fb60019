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

#include <liver/report.hpp>

#include <algorithm>

namespace liver {

bool ReportFilter::matches(const nlohmann::json& score) const {
    if (risk && score.value("risk", "") != *risk) return false;
    std::int64_t soft = score.value("soft_score", std::int64_t{0});
    if (min_score && soft < *min_score) return false;
    if (max_score && soft > *max_score) return false;
    if (rule) {
        const auto& act = score["activated"];
        bool found = std::any_of(act.begin(), act.end(), [&](const nlohmann::json& a) { return a["id"] == *rule; });
        if (!found) return false;
    }
    return true;
}

nlohmann::json make_run(const Classifier& classifier, const std::string& dataset_id,
                        const std::vector<CaseResult>& results, const std::string& created) {
    nlohmann::json scores = nlohmann::json::array();
    nlohmann::json explanations = nlohmann::json::array();
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& r : results) {
        if (r.error) {
            failures.push_back({{"case_id", r.score.case_id}, {"error", *r.error}});
            continue;
        }
        scores.push_back(to_json(r.score));
        explanations.push_back({{"case_id", r.score.case_id},
                                {"explanations", lppf::to_json(r.explanations)["explanations"]},
                                {"text", lppf::render_text(r.explanations)}});
    }
    return {{"run_id", ""},
            {"classifier_id", classifier.id},
            {"classifier_version", classifier.version},
            {"dataset_id", dataset_id},
            {"created", created},
            {"scores", std::move(scores)},
            {"explanations", std::move(explanations)},
            {"failures", std::move(failures)},
            {"text", render_batch(results)}};
}

std::string html_escape(const std::string& text) {
    std::string out;
    for (char ch : text) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&#39;"; break;
            default: out += ch;
        }
    }
    return out;
}

namespace {

struct Row {
    std::string text;
    bool labeled;
    int depth;
    int parent;
};

void flatten(const nlohmann::json& node, int depth, int parent, std::vector<Row>& rows) {
    std::string text = node.value("display", "");
    std::replace(text.begin(), text.end(), '\t', ' ');
    rows.push_back({text, node.value("labeled", false), depth, parent});
    int self = static_cast<int>(rows.size()) - 1;
    for (const auto& child : node["children"]) flatten(child, depth + 1, self, rows);
}

}  // namespace

// Indented layout: one row per node, elbow edges from parent to child.
std::string tree_svg(const nlohmann::json& node) {
    std::vector<Row> rows;
    flatten(node, 0, -1, rows);
    const int row_h = 30, indent = 28, char_w = 7, pad = 8;
    int width = 0;
    for (const auto& r : rows) {
        width = std::max(width, r.depth * indent + static_cast<int>(r.text.size()) * char_w + 2 * pad + 20);
    }
    int height = static_cast<int>(rows.size()) * row_h + 10;
    std::string svg = "<svg class=\"tree\" width=\"" + std::to_string(width) +
                      "\" height=\"" + std::to_string(height) + "\">";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        if (r.parent < 0) continue;
        int px = 10 + rows[r.parent].depth * indent + 8;
        int py = 5 + r.parent * row_h + 22;
        int cy = 5 + static_cast<int>(i) * row_h + 12;
        int cx = 10 + r.depth * indent;
        svg += "<path d=\"M" + std::to_string(px) + " " + std::to_string(py) + " V" + std::to_string(cy) + " H" +
               std::to_string(cx) + "\" class=\"edge\"/>";
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        int x = 10 + r.depth * indent;
        int y = 5 + static_cast<int>(i) * row_h;
        int w = static_cast<int>(r.text.size()) * char_w + 2 * pad;
        svg += "<g class=\"node" + std::string(r.labeled ? " labeled" : "") + "\"><rect x=\"" + std::to_string(x) +
               "\" y=\"" + std::to_string(y) + "\" width=\"" + std::to_string(w) + "\" height=\"22\" rx=\"4\"/><text x=\"" +
               std::to_string(x + pad) + "\" y=\"" + std::to_string(y + 15) + "\">" + html_escape(r.text) + "</text></g>";
    }
    return svg + "</svg>";
}

namespace {

const char* const kStyle = R"(body{font-family:sans-serif;margin:2em;color:#222}
table{border-collapse:collapse}td,th{border:1px solid #ccc;padding:4px 8px;text-align:left}
th{background:#f0f0f0}section{margin-top:2em;border-top:1px solid #ddd}
pre{background:#f8f8f8;padding:8px;overflow-x:auto}
.tree .edge{fill:none;stroke:#888}.tree rect{fill:#eef;stroke:#557}.tree .labeled rect{fill:#efe;stroke:#575}
.tree text{font-family:monospace;font-size:12px}.failure{color:#a00}
)";

std::string filter_text(const ReportFilter& f) {
    std::string out;
    auto add = [&](const std::string& s) { out += (out.empty() ? "" : ", ") + s; };
    if (f.risk) add("risk = " + *f.risk);
    if (f.min_score) add("SOFT score >= " + std::to_string(*f.min_score));
    if (f.max_score) add("SOFT score <= " + std::to_string(*f.max_score));
    if (f.rule) add("activated rule " + *f.rule);
    return out.empty() ? "none" : out;
}

}  // namespace

std::string render_report(const nlohmann::json& run, const ReportFilter& filter) {
    std::string title = "Run " + run.value("run_id", "") + ": " + run.value("classifier_id", "") + " v" +
                        std::to_string(run.value("classifier_version", 0)) + " on " + run.value("dataset_id", "");
    std::string html = "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>" + html_escape(title) +
                       "</title><style>" + kStyle + "</style></head><body>\n";
    html += "<h1>" + html_escape(title) + "</h1>\n";
    html += "<p>Created " + html_escape(run.value("created", "")) + ". Filters: " + html_escape(filter_text(filter)) +
            ".</p>\n";

    std::vector<const nlohmann::json*> shown;
    for (const auto& s : run["scores"]) {
        if (filter.matches(s)) shown.push_back(&s);
    }
    html += "<table><thead><tr><th>Case</th><th>P-SOFT</th><th>SOFT</th><th>Risk</th><th>Activated rules</th></tr>"
            "</thead><tbody>\n";
    for (const auto* s : shown) {
        std::string id = std::to_string((*s)["case_id"].get<std::int64_t>());
        std::string act;
        for (const auto& a : (*s)["activated"]) {
            std::int64_t w = a["weight"].get<std::int64_t>();
            act += (act.empty() ? "" : ", ") + a["id"].get<std::string>() + " (" + (w > 0 ? "+" : "") +
                   std::to_string(w) + ")";
        }
        html += "<tr><td><a href=\"#case-" + id + "\">" + id + "</a></td><td>" +
                std::to_string((*s)["psoft_score"].get<std::int64_t>()) + "</td><td>" +
                std::to_string((*s)["soft_score"].get<std::int64_t>()) + "</td><td>" +
                html_escape((*s)["risk"].get<std::string>()) + "</td><td>" + html_escape(act) + "</td></tr>\n";
    }
    html += "</tbody></table>\n<p>" + std::to_string(shown.size()) + " of " + std::to_string(run["scores"].size()) +
            " cases shown.</p>\n";

    if (!run["failures"].empty()) {
        html += "<h2 class=\"failure\">Failed cases</h2><ul>\n";
        for (const auto& f : run["failures"]) {
            html += "<li class=\"failure\">Case " + std::to_string(f["case_id"].get<std::int64_t>()) + ": <pre>" +
                    html_escape(f["error"].get<std::string>()) + "</pre></li>\n";
        }
        html += "</ul>\n";
    }

    for (const auto* s : shown) {
        std::int64_t id = (*s)["case_id"].get<std::int64_t>();
        html += "<section id=\"case-" + std::to_string(id) + "\"><h2>Case " + std::to_string(id) + "</h2>\n";
        for (const auto& e : run["explanations"]) {
            if (e["case_id"].get<std::int64_t>() != id) continue;
            html += "<pre>" + html_escape(e["text"].get<std::string>()) + "</pre>\n";
            for (const auto& set : e["explanations"]) {
                for (const auto& tree : set["alternatives"]) html += tree_svg(tree) + "\n";
            }
        }
        html += "</section>\n";
    }
    html += "</body></html>\n";
    return html;
}

}  // namespace liver
