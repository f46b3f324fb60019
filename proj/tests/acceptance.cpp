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

// One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

#include "support.hpp"

#include <liver/classifier.hpp>
#include <liver/service.hpp>
#include <liver/store.hpp>
#include <lppf/render.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <regex>
#include <sys/wait.h>

using namespace testing_support;

namespace {

constexpr double kGabrielSeconds = 0.1;
constexpr double kBatchSeconds = 5.0;
constexpr int kOraclePrograms = 500;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Collects the first failure of a criterion.
struct Check {
    std::string failure;
    void expect(bool ok, const std::string& what) {
        if (!ok && failure.empty()) failure = what;
    }
};

std::string run_command(const std::string& command, int& status) {
    FILE* pipe = popen((command + " 2>/dev/null").c_str(), "r");
    std::string out;
    if (!pipe) {
        status = -1;
        return out;
    }
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    int raw = pclose(pipe);
    status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return out;
}

lppf::ExplanationSet explain_one(const lppf::SolveResult& r, const std::string& query, lppf::ExplainMode mode,
                                 Check& check) {
    auto [t, v] = lppf::parse_assignment(query);
    auto targets = lppf::select_matching(r, 0, t, v);
    check.expect(targets.size() == 1, "expected one target for " + query);
    if (targets.empty()) return {};
    return lppf::explain(targets[0], r, 0, {mode, 32});
}

const char* const kGabrielAnswer =
    "Answer:1\npunish(gabriel).\nsentence(gabriel)=prison.\nsentence(clare)=innocent.\n\n1 solution\n";

std::string criterion_gabriel() {
    Check c;
    std::string source = read_text(corpus("gabriel.lppf"));
    auto start = Clock::now();
    auto r = solve_text(source);
    std::string text = lppf::render_answers(r);
    double elapsed = seconds_since(start);
    c.expect(r.answer_sets.size() == 1, "answer set count");
    c.expect(text == kGabrielAnswer, "answer block differs:\n" + text);
    c.expect(elapsed < kGabrielSeconds, "took " + std::to_string(elapsed) + " s");
    int status = 0;
    std::string cli = run_command(std::string(LPPF_BIN) + " solve " + corpus("gabriel.lppf").string(), status);
    c.expect(status == 0 && cli == kGabrielAnswer, "lppf CLI output differs");
    return c.failure;
}

std::string criterion_default_trees() {
    Check c;
    auto r = solve_text(read_text(corpus("gabriel.lppf")));
    auto set = explain_one(r, "sentence(gabriel)=prison", lppf::ExplainMode::Default, c);
    c.expect(set.alternatives.size() == 2, "alternative count");
    c.expect(lppf::render_text({set}) ==
                 "*sentence(gabriel) = prison\n"
                 " |-- punish(gabriel)\n"
                 " |    |-- alcohol(gabriel) = 60\n"
                 " |    |-- drive(gabriel)\n"
                 "\n"
                 "*sentence(gabriel) = prison\n"
                 " |-- punish(gabriel)\n"
                 " |    |-- resist(gabriel)\n"
                 "\n"
                 "1 ocurrences explained.\n",
             "tree text differs");
    return c.failure;
}

std::string criterion_labeled_trees() {
    Check c;
    auto r = solve_text(read_text(corpus("gabriel_labeled.lppf")));
    auto set = explain_one(r, "sentence(gabriel)=prison", lppf::ExplainMode::Labeled, c);
    c.expect(set.alternatives.size() == 2, "alternative count");
    for (const auto& alt : set.alternatives) {
        c.expect(alt.children.size() == 1 && alt.children[0].children.empty(), "tree is not one-child");
    }
    c.expect(lppf::render_text({set}) ==
                 "* gabriel has been sentenced to prison\n"
                 " |--  gabriel has driven drunk\n"
                 "\n"
                 "* gabriel has been sentenced to prison\n"
                 " |--  gabriel has resisted to authority\n"
                 "\n"
                 "1 ocurrences explained.\n",
             "tree text differs");
    return c.failure;
}

std::string criterion_soft_fragment() {
    Check c;
    const auto schema = liver::Schema::canonical();
    const auto classifier = liver::soft_fragment();
    auto records = liver::synthesize(76, 42);
    std::vector<liver::TransplantRecord> pinned;
    for (const auto& r : records) {
        if (r.case_id == 686 || r.case_id == 763) pinned.push_back(r);
    }
    auto results = liver::score_cases(classifier, schema, pinned);
    c.expect(results.size() == 2, "pinned cases missing");
    if (results.size() == 2) {
        const auto& a = results[0].score;
        std::vector<liver::ActivatedRule> act{{"cold_ischemia_0_6h", -3, liver::Phase::Soft},
                                              {"donor_age2_gt_60", 3, liver::Phase::Soft}};
        c.expect(a.case_id == 686 && a.soft_score == 0 && a.risk == "low" && a.activated == act, "case 686");
        const auto& b = results[1].score;
        c.expect(b.case_id == 763 && b.psoft_score == 20 && b.soft_score == 22 && b.risk == "high_moderate",
                 "case 763");
        std::string text = liver::render_batch(results);
        c.expect(text.find("* Risk level of 763 is high_moderate because SOFT score is 22\n"
                           " |--  Activated rules:\n"
                           " |    |--  donor_cerebral_vascular_accident \t[2]\n"
                           " |    |--  psoft \t[20]\n"
                           " |    |    |--  intensive_care_unit_pretransplant \t[6]\n"
                           " |    |    |--  life_support_pretransplant \t[9]\n"
                           " |    |    |--  portal_vein_thrombosis \t[5]\n") != std::string::npos,
                 "763 tree differs");
        c.expect(text.find("* Risk level of 686 is low because SOFT score is 0\n"
                           " |--  Activated rules:\n"
                           " |    |--  cold_ischemia_0_6h \t[-3]\n"
                           " |    |--  donor_age2_gt_60 \t[3]\n") != std::string::npos,
                 "686 tree differs");
    }
    auto start = Clock::now();
    auto batch = liver::render_batch(liver::score_cases(classifier, schema, records));
    double elapsed = seconds_since(start);
    c.expect(batch.find("76 ocurrences explained.") != std::string::npos, "batch count line");
    c.expect(batch.size() >= 12 && batch.compare(batch.size() - 12, 12, "\n1 solution\n") == 0, "batch trailer");
    c.expect(elapsed < kBatchSeconds, "batch took " + std::to_string(elapsed) + " s");
    return c.failure;
}

std::string criterion_weight_boundaries() {
    Check c;
    const auto schema = liver::Schema::canonical();
    const auto classifier = liver::soft_fragment();
    auto gain = [&](const std::string& attr, std::int64_t v) {
        liver::TransplantRecord r{1, {{attr, v}}};
        return liver::score_case(classifier, schema, r).score.soft_score;
    };
    c.expect(gain("bmi", 36) == 2, "bmi=36");
    c.expect(gain("bmi", 35) == 0, "bmi=35");
    c.expect(gain("donor_age", 10) == -2, "donor_age=10");
    c.expect(gain("donor_age", 20) == -2, "donor_age=20");
    c.expect(gain("donor_age", 9) == 0, "donor_age=9");
    c.expect(gain("donor_age", 21) == 0, "donor_age=21");
    return c.failure;
}

std::string criterion_oracle() {
    Check c;
    std::mt19937 rng(500);
    int discrepancies = 0;
    for (int i = 0; i < kOraclePrograms; ++i) {
        oracle::GeneratorOptions o;
        if (i % 2 == 1) {
            o.booleans = 3;
            o.function_values = 3;
            o.max_rules = 10;
        }
        auto p = oracle::random_program(rng, o);
        c.expect(p.atom_count() <= 12, "program over 12 atoms");
        auto cmp = compare_with_oracle(p);
        if (!cmp.agree) {
            ++discrepancies;
            c.expect(false, cmp.detail);
        }
    }
    c.expect(discrepancies == 0, std::to_string(discrepancies) + " discrepancies");
    return c.failure;
}

bool body_holds(const lppf::GroundRule& rule, const lppf::Valuation& v) {
    return std::all_of(rule.body.begin(), rule.body.end(), [&](const lppf::BodyLiteral& l) { return lppf::holds(l, v); });
}

// Explicit heads hold in every answer set (so no term carries two values
// and no default survives an applicable explicit rule); default heads
// always leave the term with some value.
bool rules_respected(const lppf::GroundProgram& g, const lppf::Valuation& v) {
    for (const auto& rule : g.rules) {
        if (!body_holds(rule, v)) continue;
        bool ok = std::visit(
            [&](const auto& h) {
                using H = std::decay_t<decltype(h)>;
                if constexpr (std::is_same_v<H, lppf::AssertHead>) {
                    return v.count(h.target) && v.at(h.target).is_true();
                } else if constexpr (std::is_same_v<H, lppf::DenyHead>) {
                    return v.count(h.target) && v.at(h.target).is_false();
                } else if constexpr (std::is_same_v<H, lppf::AssignHead>) {
                    auto value = lppf::evaluate(h.value, v);
                    auto key = lppf::resolve(h.target, v);
                    return value && key && v.count(*key) && v.at(*key) == *value;
                } else if constexpr (std::is_same_v<H, lppf::DefaultHead>) {
                    auto key = lppf::resolve(h.target, v);
                    return key && v.count(*key) > 0;
                } else {
                    return false;
                }
            },
            rule.head);
        if (!ok) return false;
    }
    return true;
}

std::int64_t bracket_value(const std::string& display) {
    static const std::regex re(R"re(\[(-?\d+)\]$)re");
    std::smatch m;
    return std::regex_search(display, m, re) ? std::stoll(m[1]) : 0;
}

std::string criterion_invariants() {
    Check c;

    // Functionality and default override.
    std::mt19937 rng(31);
    for (int i = 0; i < 300; ++i) {
        auto p = oracle::random_program(rng);
        try {
            auto r = lppf::solve(lppf::ground(lppf::parse_or_throw(p.source())));
            for (const auto& a : r.answer_sets) c.expect(rules_respected(*r.program, a.valuation), p.source());
        } catch (const lppf::SolveError&) {
        }
    }
    auto over = solve_text("f ^= a :- d.\nf := b :- c.\nc.\nd.\n");
    auto kept = solve_text("f ^= a :- d.\nf := b :- c.\nd.\n");
    c.expect(lppf::render_answers(over).find("f=b.") != std::string::npos, "explicit value does not override default");
    c.expect(lppf::render_answers(kept).find("f=a.") != std::string::npos, "default value missing");

    // Score additivity and explanation/score agreement.
    const auto schema = liver::Schema::canonical();
    const auto classifier = liver::soft_fragment();
    std::map<std::string, const liver::ClassifierRule*> by_id;
    for (const auto& rule : classifier.rules) by_id[rule.id] = &rule;
    for (const auto& res : liver::score_cases(classifier, schema, liver::synthesize(200, 99))) {
        std::int64_t soft = 0, psoft = 0;
        for (const auto& a : res.score.activated) {
            c.expect(by_id.count(a.id) && by_id[a.id]->value == a.weight, "activated weight");
            soft += a.weight;
            if (a.phase == liver::Phase::Psoft) psoft += a.weight;
        }
        c.expect(res.score.soft_score == soft && res.score.psoft_score == psoft, "score is not additive");
        if (res.explanations.size() != 1 || res.explanations[0].alternatives.size() != 1) {
            c.expect(false, "explanation shape");
            continue;
        }
        const auto& root = res.explanations[0].alternatives[0];
        std::int64_t tree = 0;
        for (const auto& child : root.children.at(0).children) tree += bracket_value(child.display);
        c.expect(tree == soft, "tree weights disagree with score");
        c.expect(root.display.find("SOFT score is " + std::to_string(soft)) != std::string::npos, "root score");
    }

    // Parse/render round trip over the corpus.
    for (const auto& f : corpus_files()) {
        auto p = lppf::parse_or_throw(read_text(f), f.string());
        std::string text = lppf::render(p);
        c.expect(lppf::parse_or_throw(text) == p, "round trip " + f.string());
    }

    // Re-running a classifier into a fresh store gives the same document.
    auto run_once = [] {
        TempDir dir;
        liver::Store store(dir.path);
        liver::Service service(store, [] { return std::string("2026-01-01T00:00:00Z"); });
        service.seed();
        auto r = service.handle({"POST", "/api/v1/classifiers/soft-fragment/run", {}, ""});
        auto text = store.run_text("run-000001");
        return r.status == 201 && text ? *text : std::string();
    };
    std::string first = run_once();
    c.expect(!first.empty() && first == run_once(), "run documents differ");
    return c.failure;
}

std::string criterion_no_secondary() {
    Check c;
    std::filesystem::path source = std::filesystem::path(LPPF_CORPUS_DIR).parent_path();
    std::string cmake = read_text(source / "CMakeLists.txt");
    c.expect(cmake.find("webui") == std::string::npos, "build references the web UI");
    int status = 0;
    run_command(std::string(LIVERLP_BIN) + " compile", status);
    c.expect(status == 0, "liverlp compile");
    TempDir dir;
    liver::Store store(dir.path);
    liver::Service service(store);
    service.seed();
    c.expect(service.handle({"GET", "/api/v1/schema", {}, ""}).status == 200, "service schema route");
    return c.failure;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<std::string()> run;
    };
    const std::vector<Criterion> criteria{
        {"gabriel/clare answer block", criterion_gabriel},
        {"default-mode explanation trees", criterion_default_trees},
        {"labeled-mode explanation trees", criterion_labeled_trees},
        {"SOFT fragment reproduction and 76-case batch", criterion_soft_fragment},
        {"quoted weight boundaries", criterion_weight_boundaries},
        {"stable-model oracle equivalence (500 programs)", criterion_oracle},
        {"invariant suite", criterion_invariants},
        {"primary suite without secondary components", criterion_no_secondary},
    };
    int failed = 0;
    for (const auto& criterion : criteria) {
        auto start = Clock::now();
        std::string failure;
        try {
            failure = criterion.run();
        } catch (const std::exception& e) {
            failure = std::string("exception: ") + e.what();
        }
        char timing[32];
        std::snprintf(timing, sizeof timing, "%.3f s", seconds_since(start));
        if (failure.empty()) {
            std::cout << "PASS  " << criterion.name << " (" << timing << ")\n";
        } else {
            ++failed;
            std::cout << "FAIL  " << criterion.name << " (" << timing << "): " << failure << "\n";
        }
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
