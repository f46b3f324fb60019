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

#include <liver/classifier.hpp>

#include <lppf/parser.hpp>
#include <lppf/render.hpp>

#include <algorithm>
#include <limits>
#include <map>
#include <set>

namespace liver {

const char* to_string(Phase phase) { return phase == Phase::Psoft ? "psoft" : "soft"; }

std::vector<RiskBand> default_bands() {
    return {{"low", 0, 5}, {"low_moderate", 6, 15}, {"high_moderate", 16, 35}, {"high", 36, 40}, {"futile", 41, std::nullopt}};
}

Classifier soft_fragment() {
    using lppf::CompareOp;
    Classifier c;
    c.id = "soft-fragment";
    c.name = "SOFT fragment";
    c.description = "A subset of the SOFT categories and weights; the full SOFT table is user data.";
    c.rules = {
        {"bmi_gt_35", "bmi_gt_35", 2, Phase::Soft, {{"bmi", CompareOp::Gt, std::int64_t{35}}}},
        {"donor_age_10_20",
         "donor age between 10 and 20",
         -2,
         Phase::Soft,
         {{"donor_age", CompareOp::Ge, std::int64_t{10}}, {"donor_age", CompareOp::Le, std::int64_t{20}}}},
        {"cold_ischemia_0_6h",
         "cold_ischemia_0_6h",
         -3,
         Phase::Soft,
         {{"cold_ischemia_h", CompareOp::Ge, std::int64_t{0}}, {"cold_ischemia_h", CompareOp::Le, std::int64_t{6}}}},
        {"donor_age2_gt_60", "donor_age2_gt_60", 3, Phase::Soft, {{"donor_age", CompareOp::Gt, std::int64_t{60}}}},
        {"intensive_care_unit_pretransplant",
         "intensive_care_unit_pretransplant",
         6,
         Phase::Psoft,
         {{"icu_pretransplant", CompareOp::Eq, true}}},
        {"life_support_pretransplant",
         "life_support_pretransplant",
         9,
         Phase::Psoft,
         {{"life_support_pretransplant", CompareOp::Eq, true}}},
        {"portal_vein_thrombosis",
         "portal_vein_thrombosis",
         5,
         Phase::Psoft,
         {{"portal_vein_thrombosis", CompareOp::Eq, true}}},
        {"donor_cerebral_vascular_accident",
         "donor_cerebral_vascular_accident",
         2,
         Phase::Soft,
         {{"donor_cerebral_vascular_accident", CompareOp::Eq, true}}},
    };
    c.bands = default_bands();
    return c;
}

bool is_slug(const std::string& s) {
    if (s.empty() || !(s[0] >= 'a' && s[0] <= 'z')) return false;
    return std::all_of(s.begin(), s.end(), [](char ch) {
        return (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') || ch == '_';
    });
}

namespace {

bool is_id(const std::string& s) {
    if (s.empty() || s.size() > 64 || !(std::isalnum(static_cast<unsigned char>(s[0])))) return false;
    return std::all_of(s.begin(), s.end(), [](char ch) {
        return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-';
    });
}

bool ordering(lppf::CompareOp op) { return op != lppf::CompareOp::Eq && op != lppf::CompareOp::Ne; }

std::string describe(const Condition& c) {
    return c.attribute + lppf::to_string(c.comparator) + to_string(c.operand);
}

// Whether the conditions on one attribute can hold together.
bool satisfiable(const std::vector<const Condition*>& conds, AttributeKind kind) {
    using lppf::CompareOp;
    if (kind == AttributeKind::Integer) {
        std::int64_t lo = std::numeric_limits<std::int64_t>::min();
        std::int64_t hi = std::numeric_limits<std::int64_t>::max();
        std::set<std::int64_t> excluded;
        for (const Condition* c : conds) {
            std::int64_t v = std::get<std::int64_t>(c->operand);
            switch (c->comparator) {
                case CompareOp::Eq: lo = std::max(lo, v); hi = std::min(hi, v); break;
                case CompareOp::Ne: excluded.insert(v); break;
                case CompareOp::Lt:
                    if (v == std::numeric_limits<std::int64_t>::min()) return false;
                    hi = std::min(hi, v - 1);
                    break;
                case CompareOp::Le: hi = std::min(hi, v); break;
                case CompareOp::Gt:
                    if (v == std::numeric_limits<std::int64_t>::max()) return false;
                    lo = std::max(lo, v + 1);
                    break;
                case CompareOp::Ge: lo = std::max(lo, v); break;
            }
        }
        if (lo > hi) return false;
        // Every value in [lo, hi] excluded?
        auto first = excluded.lower_bound(lo);
        auto last = excluded.upper_bound(hi);
        auto count = static_cast<std::uint64_t>(std::distance(first, last));
        return count < static_cast<std::uint64_t>(hi - lo) + 1;
    }
    std::optional<Value> eq;
    std::set<std::string> ne;
    for (const Condition* c : conds) {
        if (c->comparator == CompareOp::Eq) {
            if (eq && !(*eq == c->operand)) return false;
            eq = c->operand;
        } else {
            ne.insert(to_string(c->operand));
        }
    }
    if (eq && ne.count(to_string(*eq))) return false;
    if (kind == AttributeKind::Boolean && ne.size() >= 2) return false;
    return true;
}

std::string literal(const Condition& c) {
    using lppf::CompareOp;
    std::string fn = c.attribute + "(P)";
    if (const auto* b = std::get_if<bool>(&c.operand)) {
        if (c.comparator == CompareOp::Eq) return *b ? fn : "~" + fn;
        return fn + "!=" + (*b ? "true" : "false");
    }
    return fn + lppf::to_string(c.comparator) + to_string(c.operand);
}

std::string conditions_text(const std::vector<Condition>& conds) {
    std::string out;
    for (std::size_t i = 0; i < conds.size(); ++i) {
        if (i) out += ", ";
        out += literal(conds[i]);
    }
    return out;
}

std::string escape_percent(const std::string& s) {
    std::string out;
    for (char ch : s) {
        if (ch == '%') out += '%';
        out += ch;
    }
    return out;
}

lppf::CompareOp comparator_from(const std::string& s) {
    using lppf::CompareOp;
    static const std::map<std::string, CompareOp> ops{{"=", CompareOp::Eq},  {"!=", CompareOp::Ne}, {"<", CompareOp::Lt},
                                                      {"<=", CompareOp::Le}, {">", CompareOp::Gt},  {">=", CompareOp::Ge}};
    auto it = ops.find(s);
    if (it == ops.end()) throw ClassifierError("unknown comparator '" + s + "'");
    return it->second;
}

}  // namespace

bool has_errors(const std::vector<Finding>& findings) {
    return std::any_of(findings.begin(), findings.end(), [](const Finding& f) { return f.severity == "error"; });
}

std::vector<Finding> validate(const Classifier& c, const Schema& schema) {
    std::vector<Finding> out;
    auto error = [&](std::string code, std::string msg, std::string rule = {}, int cond = -1) {
        out.push_back({"error", std::move(code), std::move(msg), std::move(rule), cond});
    };
    auto warning = [&](std::string code, std::string msg, std::string rule = {}, int cond = -1) {
        out.push_back({"warning", std::move(code), std::move(msg), std::move(rule), cond});
    };

    if (!is_id(c.id)) error("invalid_id", "classifier id '" + c.id + "' must be letters, digits, '-' or '_'");

    std::set<std::string> ids;
    for (const auto& r : c.rules) {
        if (!is_slug(r.id) || r.id == "psoft") {
            error("invalid_rule_id", "rule id '" + r.id + "' must be a lowercase symbol other than 'psoft'", r.id);
        }
        if (!ids.insert(r.id).second) error("duplicate_rule_id", "rule id '" + r.id + "' is used twice", r.id);
        if (r.conditions.empty()) error("empty_conditions", "rule '" + r.id + "' has no conditions", r.id);
        if (r.value == 0) warning("zero_weight", "rule '" + r.id + "' has weight 0 and never changes a score", r.id);

        std::map<std::string, std::vector<const Condition*>> by_attribute;
        bool typed = true;
        for (std::size_t i = 0; i < r.conditions.size(); ++i) {
            const Condition& cond = r.conditions[i];
            int ci = static_cast<int>(i);
            const AttributeSchema* a = schema.find(cond.attribute);
            if (!a) {
                error("unknown_attribute", "rule '" + r.id + "' uses unknown attribute '" + cond.attribute + "'", r.id, ci);
                typed = false;
                continue;
            }
            bool ok = true;
            switch (a->kind) {
                case AttributeKind::Integer: ok = std::holds_alternative<std::int64_t>(cond.operand); break;
                case AttributeKind::Boolean:
                    ok = std::holds_alternative<bool>(cond.operand) && !ordering(cond.comparator);
                    break;
                case AttributeKind::Symbol:
                    ok = std::holds_alternative<std::string>(cond.operand) && is_slug(std::get<std::string>(cond.operand)) &&
                         !ordering(cond.comparator);
                    break;
            }
            if (!ok) {
                error("type_mismatch",
                      "condition " + describe(cond) + " does not fit " + to_string(a->kind) + " attribute " + a->name,
                      r.id, ci);
                typed = false;
                continue;
            }
            by_attribute[cond.attribute].push_back(&cond);
        }
        if (typed) {
            for (const auto& [attr, conds] : by_attribute) {
                if (!satisfiable(conds, schema.find(attr)->kind)) {
                    warning("unreachable", "rule '" + r.id + "' can never fire: its conditions on " + attr + " contradict",
                            r.id);
                }
            }
        }
    }

    if (c.bands.empty()) error("no_bands", "at least one risk band is required");
    std::set<std::string> band_names;
    for (std::size_t i = 0; i < c.bands.size(); ++i) {
        const RiskBand& b = c.bands[i];
        if (!is_slug(b.name)) error("invalid_band", "band name '" + b.name + "' must be a lowercase symbol");
        if (!band_names.insert(b.name).second) error("duplicate_band", "band '" + b.name + "' is listed twice");
        if (b.max && *b.max < b.min) error("invalid_band", "band '" + b.name + "' has max below min");
        bool last = i + 1 == c.bands.size();
        if (!last && !b.max) error("open_band", "only the last band may be open-ended; '" + b.name + "' has no max");
        if (!last && b.max) {
            const RiskBand& n = c.bands[i + 1];
            if (n.min > *b.max + 1) {
                error("band_gap", "scores " + std::to_string(*b.max + 1) + ".." + std::to_string(n.min - 1) +
                                      " fall between '" + b.name + "' and '" + n.name + "'");
            } else if (n.min <= *b.max) {
                error("band_overlap", "bands '" + b.name + "' and '" + n.name + "' overlap");
            }
        }
    }
    return out;
}

lppf::Program compile(const Classifier& c, const Schema& schema) {
    auto findings = validate(c, schema);
    if (has_errors(findings)) throw ClassifierError("classifier " + c.id + " is invalid", findings);

    std::string src;
    for (const auto& r : c.rules) {
        std::string v = std::to_string(r.value);
        src += lppf::quote(escape_percent(r.label) + " \t[" + v + "]") + " :: cat_val(P," + r.id + ") := " + v +
               " :- " + conditions_text(r.conditions) + ".\n";
    }
    for (const auto& r : c.rules) src += "category(" + r.id + ").\n";
    for (const auto& r : c.rules) {
        if (r.phase == Phase::Psoft) src += "psoft_cat(" + r.id + ").\n";
    }
    for (const auto& r : c.rules) {
        if (r.phase == Phase::Soft) src += "soft_cat(" + r.id + ").\n";
    }
    for (const auto& r : c.rules) {
        if (r.phase == Phase::Soft) src += "soft_key(" + r.id + ").\n";
    }
    src += "soft_key(psoft).\n";
    src += "cat_val(P,C) ^= 0 :- case(P), category(C).\n";
    src += "psoft_cal(P) := #sum{ cat_val(P,C) : psoft_cat(C) } :- case(P).\n";
    src += "\"psoft \\t[%S]\" :: soft_val(P,psoft) := S :- case(P), S = psoft_cal(P), S!=0.\n";
    src += "soft_val(P,C) := cat_val(P,C) :- case(P), soft_cat(C).\n";
    src += "\"Activated rules:\" :: soft_cal(P) := #sum{ soft_val(P,K) : soft_key(K) } :- case(P).\n";
    for (std::size_t i = 0; i < c.bands.size(); ++i) {
        const RiskBand& b = c.bands[i];
        src += "risk_band(" + b.name + ").\n";
        if (i > 0) src += "band_min(" + b.name + "):=" + std::to_string(b.min) + ".\n";
        if (i + 1 < c.bands.size()) src += "band_max(" + b.name + "):=" + std::to_string(*b.max) + ".\n";
    }
    src += "\"Risk level of %P is %R because SOFT score is %S\" :: risk(P) := R :- case(P), risk_band(R), "
           "S = soft_cal(P), not S<band_min(R), not S>band_max(R).\n";
    src += "#explain risk(P) :- case(P).\n";
    try {
        return lppf::parse_or_throw(src, "classifier " + c.id);
    } catch (const lppf::ParseError& e) {
        throw ClassifierError("classifier " + c.id + " does not compile: " + e.errors().front().format());
    }
}

std::string preview(const ClassifierRule& rule) {
    std::string out = lppf::quote(rule.label) + " :: rule(P):=" + std::to_string(rule.value);
    if (!rule.conditions.empty()) out += " :- " + conditions_text(rule.conditions);
    return out + ".";
}

Classifier clone(const Classifier& source, const std::string& new_id, const std::string& new_name,
                 const std::string& now) {
    Classifier c = source;
    c.id = new_id;
    c.name = new_name;
    c.version = 1;
    c.created = now;
    c.modified = now;
    return c;
}

// ---- documents ---------------------------------------------------------------

namespace {

nlohmann::json operand_json(const Value& v) {
    nlohmann::json j;
    std::visit([&](const auto& x) { j = x; }, v);
    return j;
}

Value operand_from(const nlohmann::json& j) {
    if (j.is_boolean()) return j.get<bool>();
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_string()) return j.get<std::string>();
    throw ClassifierError("condition operand must be an integer, boolean or symbol");
}

template <typename T>
T field(const nlohmann::json& j, const char* name, const std::string& where) {
    if (!j.contains(name)) throw ClassifierError(where + ": missing field '" + name + "'");
    try {
        return j.at(name).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ClassifierError(where + ": field '" + name + "' has the wrong type");
    }
}

}  // namespace

nlohmann::json to_json(const Classifier& c) {
    nlohmann::json rules = nlohmann::json::array();
    for (const auto& r : c.rules) {
        nlohmann::json conds = nlohmann::json::array();
        for (const auto& cond : r.conditions) {
            conds.push_back({{"attribute", cond.attribute},
                             {"comparator", lppf::to_string(cond.comparator)},
                             {"operand", operand_json(cond.operand)}});
        }
        rules.push_back({{"id", r.id},
                         {"label", r.label},
                         {"value", r.value},
                         {"phase", to_string(r.phase)},
                         {"conditions", std::move(conds)}});
    }
    nlohmann::json bands = nlohmann::json::array();
    for (const auto& b : c.bands) {
        bands.push_back({{"name", b.name}, {"min", b.min}, {"max", b.max ? nlohmann::json(*b.max) : nlohmann::json()}});
    }
    return {{"schema_version", "v1"}, {"id", c.id},         {"name", c.name},
            {"description", c.description}, {"version", c.version}, {"created", c.created},
            {"modified", c.modified},   {"rules", std::move(rules)}, {"bands", std::move(bands)}};
}

Classifier classifier_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ClassifierError("classifier document must be an object");
    if (doc.contains("schema_version") && doc["schema_version"] != "v1") {
        throw ClassifierError("unsupported schema_version " + doc["schema_version"].dump());
    }
    Classifier c;
    c.id = field<std::string>(doc, "id", "classifier");
    c.name = doc.contains("name") ? field<std::string>(doc, "name", "classifier") : c.id;
    c.description = doc.contains("description") ? field<std::string>(doc, "description", "classifier") : "";
    c.version = doc.contains("version") ? field<std::int64_t>(doc, "version", "classifier") : 1;
    c.created = doc.contains("created") ? field<std::string>(doc, "created", "classifier") : "";
    c.modified = doc.contains("modified") ? field<std::string>(doc, "modified", "classifier") : "";
    if (doc.contains("rules")) {
        if (!doc["rules"].is_array()) throw ClassifierError("rules must be a list");
        for (std::size_t i = 0; i < doc["rules"].size(); ++i) {
            const auto& jr = doc["rules"][i];
            std::string where = "rule " + std::to_string(i);
            if (!jr.is_object()) throw ClassifierError(where + " must be an object");
            ClassifierRule r;
            r.id = field<std::string>(jr, "id", where);
            r.label = jr.contains("label") ? field<std::string>(jr, "label", where) : r.id;
            r.value = field<std::int64_t>(jr, "value", where);
            std::string phase = jr.contains("phase") ? field<std::string>(jr, "phase", where) : "soft";
            if (phase == "psoft") {
                r.phase = Phase::Psoft;
            } else if (phase == "soft") {
                r.phase = Phase::Soft;
            } else {
                throw ClassifierError(where + ": phase must be psoft or soft");
            }
            if (jr.contains("conditions")) {
                if (!jr["conditions"].is_array()) throw ClassifierError(where + ": conditions must be a list");
                for (const auto& jc : jr["conditions"]) {
                    Condition cond;
                    cond.attribute = field<std::string>(jc, "attribute", where);
                    cond.comparator = comparator_from(field<std::string>(jc, "comparator", where));
                    if (!jc.contains("operand")) throw ClassifierError(where + ": condition without operand");
                    cond.operand = operand_from(jc["operand"]);
                    r.conditions.push_back(std::move(cond));
                }
            }
            c.rules.push_back(std::move(r));
        }
    }
    if (doc.contains("bands")) {
        if (!doc["bands"].is_array()) throw ClassifierError("bands must be a list");
        for (const auto& jb : doc["bands"]) {
            RiskBand b;
            b.name = field<std::string>(jb, "name", "band");
            b.min = field<std::int64_t>(jb, "min", "band " + b.name);
            if (jb.contains("max") && !jb["max"].is_null()) b.max = field<std::int64_t>(jb, "max", "band " + b.name);
            c.bands.push_back(std::move(b));
        }
    } else {
        c.bands = default_bands();
    }
    return c;
}

nlohmann::json to_json(const Finding& f) {
    nlohmann::json j{{"severity", f.severity}, {"code", f.code}, {"message", f.message}};
    if (!f.rule.empty()) j["rule"] = f.rule;
    if (f.condition >= 0) j["condition"] = f.condition;
    return j;
}

nlohmann::json to_json(const std::vector<Finding>& findings) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& f : findings) out.push_back(to_json(f));
    return out;
}

// ---- scoring -----------------------------------------------------------------

namespace {

CaseResult score_with(const lppf::Program& compiled, const Classifier& c, const Schema& schema,
                      const TransplantRecord& record) {
    using lppf::Term;
    CaseResult out;
    out.score.case_id = record.case_id;
    lppf::Program program = compiled;
    program.append(to_facts(record, schema));
    try {
        auto result = lppf::solve(lppf::ground(program));
        if (result.answer_sets.size() != 1) {
            out.error = "case " + std::to_string(record.case_id) + ": expected one answer set, got " +
                        std::to_string(result.answer_sets.size());
            return out;
        }
        const auto& as = result.answer_sets.front();
        Term id = Term::integer(record.case_id);
        auto integer = [&](const char* fn) -> std::int64_t {
            auto it = as.valuation.find(Term::function(fn, {id}));
            return it != as.valuation.end() && it->second.is_integer() ? it->second.number : 0;
        };
        out.score.psoft_score = integer("psoft_cal");
        out.score.soft_score = integer("soft_cal");
        if (auto it = as.valuation.find(Term::function("risk", {id})); it != as.valuation.end()) {
            out.score.risk = lppf::display_constant(it->second);
        }
        for (std::size_t i = 0; i < c.rules.size(); ++i) {
            auto sup = as.supports.find(Term::function("cat_val", {id, Term::symbol(c.rules[i].id)}));
            if (sup == as.supports.end()) continue;
            bool fired = std::any_of(sup->second.begin(), sup->second.end(), [&](const lppf::Support& s) {
                return result.program->rules[s.rule].origin == i;
            });
            if (fired) out.score.activated.push_back({c.rules[i].id, c.rules[i].value, c.rules[i].phase});
        }
        lppf::ExplainOptions options{lppf::ExplainMode::Labeled, 32};
        for (const auto& target : lppf::select_targets(result, 0)) {
            out.explanations.push_back(lppf::explain(target, result, 0, options));
        }
    } catch (const lppf::SolveError& e) {
        std::string msg = "case " + std::to_string(record.case_id) + ": " + lppf::to_string(e.kind()) + ": " + e.what();
        for (const auto& d : e.derivations()) msg += "\n  " + d;
        out.error = msg;
    } catch (const lppf::GroundError& e) {
        out.error = "case " + std::to_string(record.case_id) + ": " + e.what();
    }
    return out;
}

}  // namespace

CaseResult score_case(const Classifier& classifier, const Schema& schema, const TransplantRecord& record) {
    return score_with(compile(classifier, schema), classifier, schema, record);
}

std::vector<CaseResult> score_cases(const Classifier& classifier, const Schema& schema,
                                    const std::vector<TransplantRecord>& records) {
    lppf::Program compiled = compile(classifier, schema);
    std::vector<const TransplantRecord*> ordered;
    for (const auto& r : records) ordered.push_back(&r);
    std::sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->case_id < b->case_id; });
    std::vector<CaseResult> out;
    out.reserve(records.size());
    for (const auto* r : ordered) out.push_back(score_with(compiled, classifier, schema, *r));
    return out;
}

std::string render_batch(const std::vector<CaseResult>& results) {
    std::vector<lppf::ExplanationSet> sets;
    for (const auto& r : results) {
        if (r.error) continue;
        sets.insert(sets.end(), r.explanations.begin(), r.explanations.end());
    }
    return "Answer:1\n\n" + lppf::render_text(sets) + "\n1 solution\n";
}

nlohmann::json to_json(const CaseScore& s) {
    nlohmann::json activated = nlohmann::json::array();
    for (const auto& a : s.activated) {
        activated.push_back({{"id", a.id}, {"weight", a.weight}, {"phase", to_string(a.phase)}});
    }
    return {{"case_id", s.case_id},
            {"psoft_score", s.psoft_score},
            {"soft_score", s.soft_score},
            {"risk", s.risk},
            {"activated", std::move(activated)}};
}

nlohmann::json to_json(const CaseResult& r) {
    nlohmann::json j = to_json(r.score);
    j["explanations"] = lppf::to_json(r.explanations)["explanations"];
    j["text"] = r.error ? "" : lppf::render_text(r.explanations);
    j["error"] = r.error ? nlohmann::json(*r.error) : nlohmann::json();
    return j;
}

}  // namespace liver
