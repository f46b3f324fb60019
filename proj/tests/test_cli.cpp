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

#include <liver/classifier.hpp>
#include <liver/records.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sys/wait.h>

using testing_support::TempDir;
using testing_support::read_text;

namespace {

struct Outcome {
    int status = -1;
    std::string out;
};

// Runs a shell command, capturing stdout; stderr is folded in when asked.
Outcome run(const std::string& command, bool with_stderr = false) {
    std::string full = command + (with_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* pipe = popen(full.c_str(), "r");
    Outcome o;
    if (!pipe) return o;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) o.out.append(buf, n);
    int raw = pclose(pipe);
    o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return o;
}

std::string lppf_cmd(const std::string& args) { return std::string(LPPF_BIN) + " " + args; }
std::string corpus(const char* name) { return testing_support::corpus(name).string(); }
std::string liverlp_cmd(const std::string& args) { return std::string(LIVERLP_BIN) + " " + args; }

}  // namespace

TEST(LppfCli, AnswerBlock) {
    auto o = run(lppf_cmd("solve " + corpus("gabriel.lppf")));
    EXPECT_EQ(o.status, 0);
    EXPECT_EQ(o.out,
              "Answer:1\n"
              "punish(gabriel).\n"
              "sentence(gabriel)=prison.\n"
              "sentence(clare)=innocent.\n"
              "\n"
              "1 solution\n");
}

TEST(LppfCli, ExplainQuery) {
    auto o = run(lppf_cmd("solve " + corpus("gabriel.lppf") + " --explain 'sentence(gabriel)=prison'"));
    EXPECT_EQ(o.status, 0);
    EXPECT_NE(o.out.find("*sentence(gabriel) = prison\n"
                         " |-- punish(gabriel)\n"
                         " |    |-- alcohol(gabriel) = 60\n"
                         " |    |-- drive(gabriel)\n"),
              std::string::npos)
        << o.out;
    EXPECT_NE(o.out.find(" |    |-- resist(gabriel)\n"), std::string::npos);
    auto any = run(lppf_cmd("solve " + corpus("gabriel.lppf") + " --explain 'sentence(P)'"));
    EXPECT_NE(any.out.find("2 ocurrences explained."), std::string::npos) << any.out;
}

TEST(LppfCli, LabeledDirectives) {
    auto o = run(lppf_cmd("solve " + corpus("explain_directive.lppf")));
    EXPECT_EQ(o.status, 0);
    EXPECT_NE(o.out.find("ocurrences explained."), std::string::npos) << o.out;
}

TEST(LppfCli, JsonAndDot) {
    auto j = run(lppf_cmd("solve " + corpus("gabriel.lppf") + " --format json --explain-all"));
    EXPECT_EQ(j.status, 0);
    auto doc = nlohmann::json::parse(j.out);
    EXPECT_EQ(doc["solutions"], 1);
    EXPECT_EQ(doc["answers"][0]["assignments"].size(), 3u);
    EXPECT_TRUE(doc["answers"][0].contains("explanations"));
    auto d = run(lppf_cmd("solve " + corpus("gabriel.lppf") + " --format dot --explain 'sentence(gabriel)'"));
    EXPECT_EQ(d.status, 0);
    EXPECT_EQ(d.out.rfind("digraph", 0), 0u) << d.out;
}

TEST(LppfCli, ChoiceHasTwoAnswers) {
    auto o = run(lppf_cmd("solve " + corpus("choice.lppf")));
    EXPECT_EQ(o.status, 0);
    EXPECT_NE(o.out.find("Answer:2"), std::string::npos);
    EXPECT_NE(o.out.find("2 solutions"), std::string::npos) << o.out;
}

TEST(LppfCli, ExitCodes) {
    TempDir dir;
    auto bad = dir.path / "bad.lppf";
    std::ofstream(bad) << "a :- b :- c.\n";
    auto o = run(lppf_cmd("solve " + bad.string()), true);
    EXPECT_EQ(o.status, 2);
    EXPECT_NE(o.out.find("bad.lppf:1:8: syntax error"), std::string::npos) << o.out;

    auto none = dir.path / "none.lppf";
    std::ofstream(none) << "a.\n:- a.\n";
    EXPECT_EQ(run(lppf_cmd("solve " + none.string())).status, 1);
    EXPECT_EQ(run(lppf_cmd("solve")).status, 2);
    EXPECT_EQ(run(lppf_cmd("solve " + corpus("gabriel.lppf") + " --format yaml")).status, 2);
    EXPECT_EQ(run(lppf_cmd("solve " + corpus("gabriel.lppf") + " --explain 'sentence(('")).status, 2);
}

TEST(LppfCli, DumpGround) {
    auto o = run(lppf_cmd("solve --dump-ground " + corpus("gabriel.lppf")));
    EXPECT_EQ(o.status, 0);
    EXPECT_NE(o.out.find("punish(gabriel) :- drive(gabriel), alcohol(gabriel)>50."), std::string::npos) << o.out;
}

TEST(LiverlpCli, SynthIsDeterministic) {
    TempDir dir;
    auto a = dir.path / "a.csv", b = dir.path / "b.csv";
    ASSERT_EQ(run(liverlp_cmd("synth --n 76 --seed 42 --out " + a.string())).status, 0);
    ASSERT_EQ(run(liverlp_cmd("synth --out " + b.string())).status, 0);
    EXPECT_EQ(read_text(a), read_text(b));
    auto loaded = liver::load(a.string(), liver::Schema::canonical());
    EXPECT_EQ(loaded, liver::synthesize(76, 42));

    auto zero = dir.path / "zero.csv";
    ASSERT_EQ(run(liverlp_cmd("synth --n 0 --out " + zero.string())).status, 0);
    std::string text = read_text(zero);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
    EXPECT_EQ(text.rfind("case_id,", 0), 0u);

    auto json_out = dir.path / "s.json";
    ASSERT_EQ(run(liverlp_cmd("synth --n 5 --seed 3 --out " + json_out.string())).status, 0);
    EXPECT_EQ(liver::load(json_out.string(), liver::Schema::canonical()), liver::synthesize(5, 3));
}

TEST(LiverlpCli, RunAndReport) {
    TempDir dir;
    auto data = dir.path / "s.csv";
    auto report = dir.path / "r.html";
    ASSERT_EQ(run(liverlp_cmd("synth --out " + data.string())).status, 0);
    auto o = run(liverlp_cmd("--data-dir " + (dir.path / "store").string() + " run --records " + data.string() +
                             " --report " + report.string()));
    EXPECT_EQ(o.status, 0);
    auto expected = liver::score_cases(liver::soft_fragment(), liver::Schema::canonical(), liver::synthesize(76, 42));
    EXPECT_EQ(o.out, liver::render_batch(expected));
    std::string html = read_text(report);
    EXPECT_NE(html.find("<svg"), std::string::npos);
    EXPECT_EQ(html.find("src=\"http"), std::string::npos);
    EXPECT_EQ(html.find("href=\"http"), std::string::npos);

    auto one = run(liverlp_cmd("run --records " + data.string() + " --case 763"));
    EXPECT_EQ(one.status, 0);
    EXPECT_NE(one.out.find("* Risk level of 763 is high_moderate because SOFT score is 22\n"), std::string::npos);
    EXPECT_NE(one.out.find("1 ocurrences explained."), std::string::npos);
    EXPECT_EQ(run(liverlp_cmd("run --records " + data.string() + " --case 1")).status, 1);

    auto js = run(liverlp_cmd("run --records " + data.string() + " --case 686 --format json"));
    auto doc = nlohmann::json::parse(js.out);
    EXPECT_EQ(doc[0]["soft_score"], 0);
    EXPECT_EQ(doc[0]["risk"], "low");
}

TEST(LiverlpCli, ClassifierDocuments) {
    TempDir dir;
    auto file = dir.path / "c.json";
    std::ofstream(file) << liver::to_json(liver::soft_fragment()).dump(2);
    auto compiled = run(liverlp_cmd("compile --classifier " + file.string()));
    EXPECT_EQ(compiled.status, 0);
    EXPECT_NE(compiled.out.find("#explain risk(P) :- case(P)."), std::string::npos);
    EXPECT_EQ(run(liverlp_cmd("validate --classifier " + file.string())).status, 0);

    auto broken = dir.path / "broken.json";
    auto doc = liver::to_json(liver::soft_fragment());
    doc["bands"][2]["min"] = 20;
    std::ofstream(broken) << doc.dump();
    auto v = run(liverlp_cmd("validate --classifier " + broken.string()), true);
    EXPECT_EQ(v.status, 1);
    EXPECT_NE(v.out.find("band_gap"), std::string::npos) << v.out;
    EXPECT_EQ(run(liverlp_cmd("compile --classifier " + broken.string())).status, 1);
    EXPECT_EQ(run(liverlp_cmd("--data-dir " + dir.path.string() + " compile --classifier no-such-id")).status, 1);
    EXPECT_EQ(run(liverlp_cmd("run")).status, 2);
}
