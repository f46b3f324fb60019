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

#include <liver/service.hpp>

#include <liver/report.hpp>
#include <lppf/render.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <sstream>

namespace liver {

namespace {

const char* const kPrefix = "/api/v1";
const char* const kDefaultDataset = "synthetic";

struct HttpError {
    int status;
    nlohmann::json body;
};

[[noreturn]] void fail(int status, const std::string& message, nlohmann::json extra = nlohmann::json::object()) {
    extra["error"] = message;
    throw HttpError{status, std::move(extra)};
}

Response json_response(int status, const nlohmann::json& body) { return {status, "application/json", body.dump(2)}; }

nlohmann::json parse_body(const Request& req) {
    auto doc = nlohmann::json::parse(req.body, nullptr, false);
    if (doc.is_discarded()) fail(400, "request body is not valid JSON");
    return doc;
}

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> out;
    std::string part;
    std::istringstream in(path);
    while (std::getline(in, part, '/')) {
        if (!part.empty()) out.push_back(part);
    }
    return out;
}

std::optional<std::string> param(const Request& req, const std::string& key) {
    auto it = req.query.find(key);
    if (it == req.query.end() || it->second.empty()) return std::nullopt;
    return it->second;
}

std::optional<std::int64_t> integer_param(const Request& req, const std::string& key) {
    auto v = param(req, key);
    if (!v) return std::nullopt;
    try {
        std::size_t used = 0;
        std::int64_t n = std::stoll(*v, &used);
        if (used == v->size()) return n;
    } catch (const std::exception&) {
    }
    fail(400, "query parameter '" + key + "' must be an integer");
}

std::int64_t case_number(const std::string& s) {
    try {
        std::size_t used = 0;
        std::int64_t n = std::stoll(s, &used);
        if (used == s.size()) return n;
    } catch (const std::exception&) {
    }
    fail(404, "no case '" + s + "'");
}

void require_method(const Request& req, std::initializer_list<const char*> allowed) {
    for (const char* m : allowed) {
        if (req.method == m) return;
    }
    fail(405, "method " + req.method + " not allowed on " + req.path);
}

}  // namespace

std::string utc_now() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Service::Service(Store& store, Clock clock, Schema schema)
    : store_(store), clock_(std::move(clock)), schema_(std::move(schema)) {}

void Service::seed() {
    if (!store_.empty()) return;
    Classifier c = soft_fragment();
    c.created = c.modified = clock_();
    store_.put_classifier(c);
    store_.put_dataset({kDefaultDataset, "Synthetic cases (76, seed 42)", clock_(), synthesize(76, 42, schema_)});
}

Response Service::handle(const Request& req) {
    try {
        std::string path = req.path;
        if (path.rfind(kPrefix, 0) != 0) fail(404, "no route " + path);
        auto seg = split_path(path.substr(std::string(kPrefix).size()));
        if (seg.empty()) fail(404, "no route " + path);

        auto load_classifier = [&](const std::string& id) {
            auto c = store_.classifier(id);
            if (!c) fail(404, "no classifier '" + id + "'");
            return *c;
        };
        auto load_dataset = [&](const std::string& id) {
            auto d = store_.dataset(id, schema_);
            if (!d) fail(404, "no dataset '" + id + "'");
            return *d;
        };
        auto checked = [&](const Classifier& c) {
            auto findings = validate(c, schema_);
            if (has_errors(findings)) fail(422, "classifier " + c.id + " is invalid", {{"findings", to_json(findings)}});
        };
        auto load_run = [&](const std::string& id) {
            auto text = store_.run_text(id);
            if (!text) fail(404, "no run '" + id + "'");
            return *text;
        };

        const std::string& top = seg[0];
        if (top == "schema" && seg.size() == 1) {
            require_method(req, {"GET"});
            return json_response(200, to_json(schema_));
        }

        if (top == "validate" && seg.size() == 1) {
            require_method(req, {"POST"});
            Classifier c = classifier_from_json(parse_body(req));
            return json_response(200, {{"findings", to_json(validate(c, schema_))}});
        }

        if (top == "preview" && seg.size() == 1) {
            require_method(req, {"POST"});
            nlohmann::json doc = parse_body(req);
            if (!doc.contains("id")) doc["id"] = "preview";
            nlohmann::json wrapper{{"id", "preview"}, {"rules", nlohmann::json::array({doc})}};
            Classifier c = classifier_from_json(wrapper);
            nlohmann::json findings = nlohmann::json::array();
            for (const auto& f : validate(c, schema_)) {
                if (!f.rule.empty()) findings.push_back(to_json(f));
            }
            return json_response(200, {{"preview", preview(c.rules.front())}, {"findings", findings}});
        }

        if (top == "classifiers") {
            if (seg.size() == 1) {
                require_method(req, {"GET", "POST"});
                if (req.method == "GET") {
                    nlohmann::json list = nlohmann::json::array();
                    for (const auto& c : store_.classifiers()) list.push_back(to_json(c));
                    return json_response(200, list);
                }
                Classifier c = classifier_from_json(parse_body(req));
                if (!is_safe_id(c.id)) fail(422, "classifier id '" + c.id + "' is not a valid id");
                if (store_.classifier(c.id)) fail(409, "classifier '" + c.id + "' already exists");
                checked(c);
                c.version = 1;
                c.created = c.modified = clock_();
                store_.put_classifier(c);
                return json_response(201, to_json(c));
            }
            const std::string& id = seg[1];
            if (seg.size() == 2) {
                require_method(req, {"GET", "PUT", "DELETE"});
                Classifier old = load_classifier(id);
                if (req.method == "GET") return json_response(200, to_json(old));
                if (req.method == "DELETE") {
                    auto runs = store_.runs_using(id);
                    if (!runs.empty() && param(req, "force") != "true") {
                        fail(409, "classifier '" + id + "' is used by " + std::to_string(runs.size()) + " run(s)",
                             {{"runs", runs}});
                    }
                    store_.remove_classifier(id);
                    return {204, "application/json", ""};
                }
                nlohmann::json doc = parse_body(req);
                if (!doc.is_object()) fail(422, "classifier document must be an object");
                if (!doc.contains("id")) doc["id"] = id;
                Classifier c = classifier_from_json(doc);
                if (c.id != id) fail(422, "document id '" + c.id + "' does not match '" + id + "'");
                checked(c);
                c.version = old.version + 1;
                c.created = old.created;
                c.modified = clock_();
                store_.put_classifier(c);
                return json_response(200, to_json(c));
            }
            if (seg.size() == 3 && seg[2] == "clone") {
                require_method(req, {"POST"});
                Classifier src = load_classifier(id);
                nlohmann::json doc = req.body.empty() ? nlohmann::json::object() : parse_body(req);
                std::string new_id = doc.value("id", "");
                std::string new_name = doc.value("name", "copy-of-" + src.name);
                if (new_id.empty()) {
                    new_id = "copy-of-" + src.id;
                    for (int n = 2; store_.classifier(new_id); ++n) new_id = "copy-of-" + src.id + "-" + std::to_string(n);
                }
                if (!is_safe_id(new_id)) fail(422, "classifier id '" + new_id + "' is not a valid id");
                if (store_.classifier(new_id)) fail(409, "classifier '" + new_id + "' already exists");
                Classifier c = clone(src, new_id, new_name, clock_());
                store_.put_classifier(c);
                return json_response(201, to_json(c));
            }
            if (seg.size() == 3 && seg[2] == "program") {
                require_method(req, {"GET"});
                Classifier c = load_classifier(id);
                checked(c);
                return {200, "text/plain; charset=utf-8", lppf::render(compile(c, schema_))};
            }
            if (seg.size() == 3 && seg[2] == "run") {
                require_method(req, {"POST"});
                Classifier c = load_classifier(id);
                Dataset d = load_dataset(param(req, "dataset").value_or(kDefaultDataset));
                checked(c);
                auto results = score_cases(c, schema_, d.records);
                nlohmann::json run = make_run(c, d.id, results, clock_());
                std::string run_id = store_.add_run(run);
                nlohmann::json stored = nlohmann::json::parse(*store_.run_text(run_id));
                if (!stored["failures"].empty()) {
                    return json_response(500, {{"error", std::to_string(stored["failures"].size()) + " case(s) failed"},
                                               {"run_id", run_id},
                                               {"failures", stored["failures"]},
                                               {"run", stored}});
                }
                return json_response(201, stored);
            }
        }

        if (top == "runs") {
            if (seg.size() == 1) {
                require_method(req, {"GET"});
                nlohmann::json list = nlohmann::json::array();
                for (const auto& id : store_.run_ids()) {
                    auto doc = nlohmann::json::parse(*store_.run_text(id));
                    list.push_back({{"run_id", id},
                                    {"classifier_id", doc["classifier_id"]},
                                    {"classifier_version", doc["classifier_version"]},
                                    {"dataset_id", doc["dataset_id"]},
                                    {"created", doc["created"]},
                                    {"cases", doc["scores"].size()},
                                    {"failures", doc["failures"].size()}});
                }
                return json_response(200, list);
            }
            require_method(req, {"GET"});
            std::string text = load_run(seg[1]);
            if (seg.size() == 2) return {200, "application/json", text};
            nlohmann::json run = nlohmann::json::parse(text);
            if (seg.size() == 3 && seg[2] == "report") {
                ReportFilter filter{param(req, "risk"), integer_param(req, "min_score"), integer_param(req, "max_score"),
                                    param(req, "rule")};
                return {200, "text/html; charset=utf-8", render_report(run, filter)};
            }
            if (seg.size() == 4 && seg[2] == "cases") {
                std::int64_t n = case_number(seg[3]);
                for (const auto& s : run["scores"]) {
                    if (s["case_id"] != n) continue;
                    nlohmann::json out = s;
                    for (const auto& e : run["explanations"]) {
                        if (e["case_id"] != n) continue;
                        out["explanations"] = e["explanations"];
                        out["text"] = e["text"];
                    }
                    out["error"] = nullptr;
                    return json_response(200, out);
                }
                for (const auto& f : run["failures"]) {
                    if (f["case_id"] == n) {
                        return json_response(200, {{"case_id", n}, {"error", f["error"]}, {"explanations", nlohmann::json::array()}});
                    }
                }
                fail(404, "run " + seg[1] + " has no case " + seg[3]);
            }
        }

        if (top == "datasets") {
            if (seg.size() == 1) {
                require_method(req, {"GET", "POST"});
                if (req.method == "GET") {
                    nlohmann::json list = nlohmann::json::array();
                    for (const auto& id : store_.dataset_ids()) {
                        auto d = store_.dataset(id, schema_);
                        if (!d) continue;
                        list.push_back({{"id", d->id}, {"name", d->name}, {"created", d->created}, {"cases", d->records.size()}});
                    }
                    return json_response(200, list);
                }
                nlohmann::json doc = parse_body(req);
                Dataset d;
                if (doc.is_object() && doc.contains("csv")) {
                    if (!doc["csv"].is_string()) fail(422, "csv must be a string");
                    std::istringstream in(doc["csv"].get<std::string>());
                    d.id = doc.value("id", "");
                    d.name = doc.value("name", d.id);
                    d.records = load_csv(in, schema_);
                } else {
                    d = dataset_from_json(doc, schema_);
                }
                if (!is_safe_id(d.id)) fail(422, "dataset id '" + d.id + "' is not a valid id");
                if (store_.dataset(d.id, schema_)) fail(409, "dataset '" + d.id + "' already exists");
                auto problems = check_records(d.records, schema_);
                if (!problems.empty()) fail(422, "dataset " + d.id + " is invalid", {{"findings", problems}});
                std::sort(d.records.begin(), d.records.end(),
                          [](const auto& a, const auto& b) { return a.case_id < b.case_id; });
                d.created = clock_();
                store_.put_dataset(d);
                return json_response(201, {{"id", d.id}, {"name", d.name}, {"created", d.created}, {"cases", d.records.size()}});
            }
            if (seg.size() == 2) {
                require_method(req, {"GET"});
                return json_response(200, to_json(load_dataset(seg[1])));
            }
        }

        if (top == "transplants") {
            Dataset d = load_dataset(param(req, "dataset").value_or(kDefaultDataset));
            std::sort(d.records.begin(), d.records.end(), [](const auto& a, const auto& b) { return a.case_id < b.case_id; });
            if (seg.size() == 1) {
                require_method(req, {"GET"});
                return json_response(200, to_json(d.records));
            }
            std::int64_t n = case_number(seg[1]);
            auto it = std::find_if(d.records.begin(), d.records.end(), [&](const auto& r) { return r.case_id == n; });
            if (it == d.records.end()) fail(404, "dataset " + d.id + " has no case " + seg[1]);
            if (seg.size() == 2) {
                require_method(req, {"GET"});
                return json_response(200, to_json(*it));
            }
            if (seg.size() == 4 && seg[2] == "apply") {
                require_method(req, {"POST"});
                Classifier c = load_classifier(seg[3]);
                checked(c);
                CaseResult r = score_case(c, schema_, *it);
                return json_response(r.error ? 500 : 200, to_json(r));
            }
        }
        fail(404, "no route " + req.method + " " + path);
    } catch (const HttpError& e) {
        return json_response(e.status, e.body);
    } catch (const ClassifierError& e) {
        return json_response(422, {{"error", e.what()}, {"findings", to_json(e.findings())}});
    } catch (const RecordError& e) {
        return json_response(422, {{"error", e.what()}});
    } catch (const nlohmann::json::exception& e) {
        return json_response(422, {{"error", std::string("malformed document: ") + e.what()}});
    } catch (const std::exception& e) {
        return json_response(500, {{"error", e.what()}});
    }
}

}  // namespace liver
