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

#include "support.hpp"

#include <liver/report.hpp>
#include <liver/service.hpp>
#include <liver/store.hpp>
#include <lppf/render.hpp>

#include <httplib.h>

#include <gtest/gtest.h>

#include <thread>

using namespace liver;
using nlohmann::json;
using testing_support::TempDir;

namespace {

class ServiceTest : public ::testing::Test {
protected:
    ServiceTest() : store_(dir_.path), service_(store_, [this] { return now(); }) { service_.seed(); }

    std::string now() {
        char buf[32];
        std::snprintf(buf, sizeof buf, "2026-03-01T00:00:%02dZ", tick_++ % 60);
        return buf;
    }

    Response call(const std::string& method, const std::string& path, const std::string& body = "",
                  std::map<std::string, std::string> query = {}) {
        return service_.handle({method, path, std::move(query), body});
    }

    json call_json(const std::string& method, const std::string& path, int expected, const std::string& body = "",
                   std::map<std::string, std::string> query = {}) {
        Response r = call(method, path, body, std::move(query));
        EXPECT_EQ(r.status, expected) << method << " " << path << ": " << r.body;
        if (r.body.empty()) return nullptr;
        return json::parse(r.body);
    }

    TempDir dir_;
    Store store_;
    Service service_;
    int tick_ = 0;
};

}  // namespace

TEST_F(ServiceTest, SeedsDefaultsOnce) {
    auto list = call_json("GET", "/api/v1/classifiers", 200);
    ASSERT_EQ(list.size(), 1u);
    EXPECT_EQ(list[0]["id"], "soft-fragment");
    auto datasets = call_json("GET", "/api/v1/datasets", 200);
    ASSERT_EQ(datasets.size(), 1u);
    EXPECT_EQ(datasets[0]["id"], "synthetic");
    EXPECT_EQ(datasets[0]["cases"], 76);
    service_.seed();
    EXPECT_EQ(call_json("GET", "/api/v1/classifiers", 200).size(), 1u);
}

TEST_F(ServiceTest, Schema) {
    auto s = call_json("GET", "/api/v1/schema", 200);
    EXPECT_EQ(s, to_json(Schema::canonical()));
}

TEST_F(ServiceTest, ClassifierLifecycle) {
    json doc = to_json(soft_fragment());
    doc["id"] = "mine";
    doc["name"] = "Mine";
    auto created = call_json("POST", "/api/v1/classifiers", 201, doc.dump());
    EXPECT_EQ(created["version"], 1);
    EXPECT_EQ(created["created"], created["modified"]);
    call_json("POST", "/api/v1/classifiers", 409, doc.dump());

    doc["rules"][0]["value"] = 7;
    auto updated = call_json("PUT", "/api/v1/classifiers/mine", 200, doc.dump());
    EXPECT_EQ(updated["version"], 2);
    EXPECT_EQ(updated["created"], created["created"]);
    EXPECT_NE(updated["modified"], created["modified"]);
    EXPECT_EQ(call_json("GET", "/api/v1/classifiers/mine", 200)["rules"][0]["value"], 7);

    doc["id"] = "other";
    call_json("PUT", "/api/v1/classifiers/mine", 422, doc.dump());

    call_json("DELETE", "/api/v1/classifiers/mine", 204);
    call_json("GET", "/api/v1/classifiers/mine", 404);
    call_json("DELETE", "/api/v1/classifiers/mine", 404);
}

TEST_F(ServiceTest, StoredDocumentsReadBackByteIdentical) {
    std::string first = call("GET", "/api/v1/classifiers/soft-fragment").body;
    call_json("PUT", "/api/v1/classifiers/soft-fragment", 200, first);
    json again = call_json("GET", "/api/v1/classifiers/soft-fragment", 200);
    json expected = json::parse(first);
    expected["version"] = 2;
    expected["modified"] = again["modified"];
    EXPECT_EQ(again, expected);
    EXPECT_EQ(classifier_from_json(again).rules, soft_fragment().rules);
    EXPECT_EQ(call("GET", "/api/v1/classifiers/soft-fragment").body, call("GET", "/api/v1/classifiers/soft-fragment").body);
}

TEST_F(ServiceTest, InvalidClassifiersAreRejectedWithFindings) {
    json doc = to_json(soft_fragment());
    doc["id"] = "gappy";
    doc["bands"][1]["min"] = 9;
    auto r = call_json("POST", "/api/v1/classifiers", 422, doc.dump());
    ASSERT_TRUE(r["findings"].is_array());
    EXPECT_EQ(r["findings"][0]["code"], "band_gap");
    call_json("GET", "/api/v1/classifiers/gappy", 404);

    call_json("POST", "/api/v1/classifiers", 400, "{not json");
    call_json("POST", "/api/v1/classifiers", 422, R"({"id":"x","rules":[{"id":"a","value":"big"}]})");
    doc["id"] = "../etc";
    doc["bands"][1]["min"] = 8;
    call_json("POST", "/api/v1/classifiers", 422, doc.dump());
}

TEST_F(ServiceTest, ValidateAndPreview) {
    json doc = to_json(soft_fragment());
    EXPECT_TRUE(call_json("POST", "/api/v1/validate", 200, doc.dump())["findings"].empty());
    doc["rules"][0]["conditions"][0]["attribute"] = "height";
    auto f = call_json("POST", "/api/v1/validate", 200, doc.dump())["findings"];
    ASSERT_EQ(f.size(), 1u);
    EXPECT_EQ(f[0]["code"], "unknown_attribute");

    json rule = to_json(soft_fragment())["rules"][1];
    auto p = call_json("POST", "/api/v1/preview", 200, rule.dump());
    EXPECT_EQ(p["preview"], "\"donor age between 10 and 20\" :: rule(P):=-2 :- donor_age(P)>=10, donor_age(P)<=20.");
    EXPECT_TRUE(p["findings"].empty());
    rule["conditions"][0]["operand"] = true;
    p = call_json("POST", "/api/v1/preview", 200, rule.dump());
    EXPECT_EQ(p["findings"][0]["code"], "type_mismatch");
}

TEST_F(ServiceTest, CloneThenEditLeavesOriginal) {
    auto copy = call_json("POST", "/api/v1/classifiers/soft-fragment/clone", 201);
    EXPECT_EQ(copy["id"], "copy-of-soft-fragment");
    auto second = call_json("POST", "/api/v1/classifiers/soft-fragment/clone", 201);
    EXPECT_EQ(second["id"], "copy-of-soft-fragment-2");
    call_json("POST", "/api/v1/classifiers/soft-fragment/clone", 409, R"({"id":"copy-of-soft-fragment"})");
    auto named = call_json("POST", "/api/v1/classifiers/soft-fragment/clone", 201, R"({"id":"named","name":"Named"})");
    EXPECT_EQ(named["name"], "Named");

    copy["rules"][0]["value"] = 1;
    call_json("PUT", "/api/v1/classifiers/copy-of-soft-fragment", 200, copy.dump());
    auto original = classifier_from_json(call_json("GET", "/api/v1/classifiers/soft-fragment", 200));
    EXPECT_EQ(original.rules, soft_fragment().rules);
    EXPECT_EQ(original.version, 1);
}

TEST_F(ServiceTest, Program) {
    Response r = call("GET", "/api/v1/classifiers/soft-fragment/program");
    EXPECT_EQ(r.status, 200);
    EXPECT_EQ(r.content_type.rfind("text/plain", 0), 0u);
    EXPECT_EQ(r.body, lppf::render(compile(soft_fragment(), Schema::canonical())));
}

TEST_F(ServiceTest, RunScoresSyntheticDataset) {
    auto run = call_json("POST", "/api/v1/classifiers/soft-fragment/run", 201);
    EXPECT_EQ(run["run_id"], "run-000001");
    EXPECT_EQ(run["dataset_id"], "synthetic");
    EXPECT_EQ(run["classifier_version"], 1);
    ASSERT_EQ(run["scores"].size(), 76u);
    EXPECT_TRUE(run["failures"].empty());

    auto expected = score_cases(soft_fragment(), Schema::canonical(), synthesize(76, 42));
    for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(run["scores"][i], to_json(expected[i].score));
    EXPECT_EQ(run["text"], render_batch(expected));

    auto listed = call_json("GET", "/api/v1/runs", 200);
    ASSERT_EQ(listed.size(), 1u);
    EXPECT_EQ(listed[0]["cases"], 76);
    EXPECT_EQ(listed[0]["failures"], 0);

    Response raw = call("GET", "/api/v1/runs/run-000001");
    EXPECT_EQ(raw.body, *store_.run_text("run-000001"));
    EXPECT_EQ(json::parse(raw.body), run);

    auto c763 = call_json("GET", "/api/v1/runs/run-000001/cases/763", 200);
    EXPECT_EQ(c763["soft_score"], 22);
    EXPECT_EQ(c763["risk"], "high_moderate");
    EXPECT_NE(c763["text"].get<std::string>().find("psoft \t[20]"), std::string::npos);
    call_json("GET", "/api/v1/runs/run-000001/cases/5", 404);
    call_json("GET", "/api/v1/runs/run-000001/cases/abc", 404);
    call_json("GET", "/api/v1/runs/run-000009", 404);
    call_json("POST", "/api/v1/classifiers/soft-fragment/run", 404, "", {{"dataset", "nope"}});
}

TEST_F(ServiceTest, DeleteGuardedByRuns) {
    call_json("POST", "/api/v1/classifiers/soft-fragment/run", 201);
    auto r = call_json("DELETE", "/api/v1/classifiers/soft-fragment", 409);
    EXPECT_EQ(r["runs"][0], "run-000001");
    call_json("DELETE", "/api/v1/classifiers/soft-fragment", 204, "", {{"force", "true"}});
    call_json("GET", "/api/v1/runs/run-000001", 200);
}

TEST_F(ServiceTest, ReportFilters) {
    call_json("POST", "/api/v1/classifiers/soft-fragment/run", 201);
    auto run = json::parse(*store_.run_text("run-000001"));
    auto count = [&](std::map<std::string, std::string> q) {
        Response r = call("GET", "/api/v1/runs/run-000001/report", "", q);
        EXPECT_EQ(r.status, 200);
        EXPECT_EQ(r.content_type.rfind("text/html", 0), 0u);
        EXPECT_EQ(r.body.find("http://"), std::string::npos);
        EXPECT_EQ(r.body.find("https://"), std::string::npos);
        EXPECT_EQ(r.body.find("<script"), std::string::npos);
        std::size_t n = 0;
        for (auto pos = r.body.find("<section"); pos != std::string::npos; pos = r.body.find("<section", pos + 1)) ++n;
        return n;
    };
    auto expected = [&](auto pred) {
        std::size_t n = 0;
        for (const auto& s : run["scores"]) n += pred(s) ? 1 : 0;
        return n;
    };
    EXPECT_EQ(count({}), 76u);
    EXPECT_EQ(count({{"risk", "low"}}), expected([](const json& s) { return s["risk"] == "low"; }));
    EXPECT_EQ(count({{"min_score", "5"}, {"max_score", "10"}}), expected([](const json& s) {
                  return s["soft_score"] >= 5 && s["soft_score"] <= 10;
              }));
    EXPECT_EQ(count({{"rule", "psoft_life_support"}}), expected([](const json& s) {
                  for (const auto& a : s["activated"]) {
                      if (a["id"] == "psoft_life_support") return true;
                  }
                  return false;
              }));
    EXPECT_EQ(count({{"rule", "life_support_pretransplant"}}), expected([](const json& s) {
                  for (const auto& a : s["activated"]) {
                      if (a["id"] == "life_support_pretransplant") return true;
                  }
                  return false;
              }));
    EXPECT_GE(count({{"rule", "life_support_pretransplant"}}), 1u);
    call_json("GET", "/api/v1/runs/run-000001/report", 400, "", {{"min_score", "lots"}});
}

TEST_F(ServiceTest, Transplants) {
    auto list = call_json("GET", "/api/v1/transplants", 200);
    ASSERT_EQ(list.size(), 76u);
    for (std::size_t i = 1; i < list.size(); ++i) EXPECT_LT(list[i - 1]["case_id"], list[i]["case_id"]);
    auto one = call_json("GET", "/api/v1/transplants/686", 200);
    EXPECT_EQ(one["case_id"], 686);
    call_json("GET", "/api/v1/transplants/1", 404);

    auto applied = call_json("POST", "/api/v1/transplants/686/apply/soft-fragment", 200);
    EXPECT_EQ(applied["soft_score"], 0);
    EXPECT_EQ(applied["risk"], "low");
    EXPECT_EQ(applied["activated"].size(), 2u);
    call_json("POST", "/api/v1/transplants/686/apply/none", 404);
}

TEST_F(ServiceTest, DatasetsFromCsvAndJson) {
    json csv_doc{{"id", "ward"}, {"name", "Ward"}, {"csv", "case_id,bmi,donor_age\n7,40,\n3,,15\n9,,\n"}};
    auto made = call_json("POST", "/api/v1/datasets", 201, csv_doc.dump());
    EXPECT_EQ(made["cases"], 3);
    call_json("POST", "/api/v1/datasets", 409, csv_doc.dump());

    auto list = call_json("GET", "/api/v1/transplants", 200, "", {{"dataset", "ward"}});
    ASSERT_EQ(list.size(), 3u);
    EXPECT_EQ(list[0]["case_id"], 3);

    // A case with every attribute missing scores 0 with no activated rules.
    auto empty = call_json("POST", "/api/v1/transplants/9/apply/soft-fragment", 200, "", {{"dataset", "ward"}});
    EXPECT_EQ(empty["soft_score"], 0);
    EXPECT_EQ(empty["risk"], "low");
    EXPECT_TRUE(empty["activated"].empty());

    auto run = call_json("POST", "/api/v1/classifiers/soft-fragment/run", 201, "", {{"dataset", "ward"}});
    EXPECT_EQ(run["scores"][0]["soft_score"], -2);
    EXPECT_EQ(run["scores"][1]["soft_score"], 2);

    json structured{{"id", "js"}, {"records", json::array({{{"case_id", 1}, {"values", {{"bmi", 50}}}}})}};
    call_json("POST", "/api/v1/datasets", 201, structured.dump());
    EXPECT_EQ(call_json("GET", "/api/v1/datasets/js", 200)["records"][0]["values"]["bmi"], 50);

    call_json("POST", "/api/v1/datasets", 422, json{{"id", "bad"}, {"csv", "bmi\n3\n"}}.dump());
    call_json("POST", "/api/v1/datasets", 422, json{{"id", "bad"}, {"csv", "case_id,bmi\n1,heavy\n"}}.dump());
    call_json("GET", "/api/v1/datasets/none", 404);
}

TEST_F(ServiceTest, RoutingErrors) {
    call_json("GET", "/api/v1/nowhere", 404);
    call_json("GET", "/elsewhere", 404);
    call_json("PATCH", "/api/v1/classifiers/soft-fragment", 405);
    call_json("DELETE", "/api/v1/schema", 405);
}

TEST(ServiceReproducibility, SameRunInFreshStore) {
    auto run_once = [] {
        TempDir dir;
        Store store(dir.path);
        Service service(store, [] { return std::string("2026-03-01T00:00:00Z"); });
        service.seed();
        Response r = service.handle({"POST", "/api/v1/classifiers/soft-fragment/run", {}, ""});
        EXPECT_EQ(r.status, 201);
        return *store.run_text("run-000001");
    };
    EXPECT_EQ(run_once(), run_once());
}

TEST(ServiceHttp, ServesApiOverHttp) {
    TempDir dir;
    Store store(dir.path);
    Service service(store);
    service.seed();
    httplib::Server server;
    mount(server, service);
    int port = server.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port, 0);
    std::thread worker([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    auto schema = client.Get("/api/v1/schema");
    ASSERT_TRUE(schema);
    EXPECT_EQ(schema->status, 200);
    EXPECT_EQ(json::parse(schema->body), to_json(Schema::canonical()));
    auto applied = client.Post("/api/v1/transplants/763/apply/soft-fragment", "", "application/json");
    ASSERT_TRUE(applied);
    EXPECT_EQ(json::parse(applied->body)["soft_score"], 22);
    auto missing = client.Get("/api/v1/transplants?dataset=nope");
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->status, 404);
    auto deleted = client.Delete("/api/v1/classifiers/soft-fragment");
    ASSERT_TRUE(deleted);
    EXPECT_EQ(deleted->status, 204);

    server.stop();
    worker.join();
}
