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

#include <lppf/render.hpp>

#include <gtest/gtest.h>

using namespace lppf;
using testing_support::corpus;
using testing_support::corpus_files;
using testing_support::read_text;

TEST(Parser, FactsAndRuleKinds) {
    auto p = parse_or_throw(
        "drive(gabriel).\n"
        "~resist(clare).\n"
        "alcohol(gabriel):=60.\n"
        "sentence(P) ^= innocent :- person(P).\n"
        "total(P) := #sum{ w(P,C) : cat(C) } :- case(P).\n"
        ":- paint(box) = green.\n");
    ASSERT_EQ(p.rules.size(), 6u);
    EXPECT_TRUE(std::holds_alternative<AssertHead>(p.rules[0].head));
    EXPECT_TRUE(p.rules[0].body.empty());
    EXPECT_TRUE(std::holds_alternative<DenyHead>(p.rules[1].head));
    EXPECT_TRUE(std::holds_alternative<AssignHead>(p.rules[2].head));
    EXPECT_TRUE(std::holds_alternative<DefaultHead>(p.rules[3].head));
    EXPECT_TRUE(std::holds_alternative<AggregateHead>(p.rules[4].head));
    EXPECT_TRUE(std::holds_alternative<ConstraintHead>(p.rules[5].head));
    EXPECT_EQ(to_string(*head_target(p.rules[3].head)), "sentence(P)");
}

TEST(Parser, BodyLiterals) {
    auto p = parse_or_throw("a(X) :- b(X), ~c(X), not d(X), not ~e(X), f(X)>50, not g(X)=k, X = h(X)+1.");
    ASSERT_EQ(p.rules.size(), 1u);
    const auto& body = p.rules[0].body;
    ASSERT_EQ(body.size(), 7u);
    EXPECT_TRUE(std::holds_alternative<PositiveAtom>(body[0].payload));
    EXPECT_TRUE(std::holds_alternative<NegativeAtom>(body[1].payload));
    EXPECT_TRUE(body[2].default_negated);
    EXPECT_TRUE(body[3].default_negated && std::holds_alternative<NegativeAtom>(body[3].payload));
    EXPECT_TRUE(std::holds_alternative<Comparison>(body[4].payload));
    EXPECT_EQ(std::get<Comparison>(body[4].payload).op, CompareOp::Gt);
    EXPECT_TRUE(body[5].default_negated && std::holds_alternative<Comparison>(body[5].payload));
}

TEST(Parser, LabelsAndDirectives) {
    auto p = parse_or_throw(
        "\"%P has driven drunk\"\n  punish(P) :- drive(P).\n"
        "r(P) :: punish(P) :- resist(P).\n"
        "#label r :: resist(P).\n"
        "#explain sentence(P) :- sentence(P)=prison, alcohol(P)>55, ~resist(P).\n");
    ASSERT_EQ(p.rules.size(), 2u);
    ASSERT_TRUE(p.rules[0].label.has_value());
    EXPECT_TRUE(std::holds_alternative<TextLabel>(*p.rules[0].label));
    EXPECT_TRUE(std::holds_alternative<TermLabel>(*p.rules[1].label));
    EXPECT_TRUE(p.has_labels());
    ASSERT_EQ(p.directives.size(), 2u);
    auto ex = p.explain_directives();
    ASSERT_EQ(ex.size(), 1u);
    EXPECT_EQ(to_string(ex[0].target), "sentence(P)");
    EXPECT_EQ(ex[0].conditions.size(), 3u);
}

TEST(Parser, CommentsAndWhitespace) {
    auto p = parse_or_throw("% a comment\np(a). % trailing\n\n  q(b) :-\n    p(a).\n");
    EXPECT_EQ(p.rules.size(), 2u);
}

TEST(Parser, ErrorsCarryPosition) {
    auto r = parse("p(a).\nq(b :- p(a).\n", "bad.lppf");
    ASSERT_FALSE(r.errors.empty());
    EXPECT_EQ(r.errors[0].origin, "bad.lppf");
    EXPECT_EQ(r.errors[0].line, 2);
    EXPECT_EQ(r.errors[0].column, 5);
    EXPECT_EQ(r.errors[0].format().rfind("bad.lppf:2:5: ", 0), 0u);
}

TEST(Parser, RecoversAfterBadStatement) {
    auto r = parse("p(a.\nq(b).\nr(c.\n", "x");
    EXPECT_EQ(r.errors.size(), 2u);
    EXPECT_EQ(r.errors[1].line, 3);
    EXPECT_THROW(parse_or_throw("p(a."), ParseError);
}

TEST(Parser, UnterminatedString) {
    auto r = parse("\"oops\np(a).\n", "s");
    ASSERT_FALSE(r.errors.empty());
    EXPECT_EQ(r.errors[0].line, 1);
}

TEST(Parser, UnsafeVariableRejected) {
    auto r = parse("p(X) :- not q(X).\n", "u");
    ASSERT_FALSE(r.errors.empty());
    EXPECT_NE(r.errors[0].message.find("X"), std::string::npos);
}

TEST(Parser, Assignments) {
    auto [t, v] = parse_assignment("sentence(gabriel)=prison");
    EXPECT_EQ(to_string(t), "sentence(gabriel)");
    EXPECT_EQ(to_string(v), "prison");
    auto [t2, v2] = parse_assignment("punish(gabriel)");
    EXPECT_TRUE(v2.is_true());
    auto [t3, v3] = parse_assignment("~resist(clare)");
    EXPECT_TRUE(v3.is_false());
    auto [t4, v4] = parse_assignment("sentence(P)=X");
    EXPECT_TRUE(v4.is_variable());
    EXPECT_THROW(parse_assignment("sentence("), ParseError);
}

TEST(Parser, SplitLabel) {
    auto pieces = split_label("%P is %R because %%S");
    std::string joined;
    for (const auto& piece : pieces) joined += "[" + (piece.variable.empty() ? piece.text : "%" + piece.variable) + "]";
    EXPECT_EQ(joined, "[%P][ is ][%R][ because %S]");
}

TEST(Render, QuoteEscapes) {
    EXPECT_EQ(quote("a \"b\"\tc\\"), "\"a \\\"b\\\"\\tc\\\\\"");
}

TEST(Render, CanonicalForms) {
    auto p = parse_or_throw("alcohol(gabriel) := 60. ~resist(clare). a(X):-b(X),X>1+2*3.");
    EXPECT_EQ(render(p.rules[0]), "alcohol(gabriel):=60.");
    EXPECT_EQ(render(p.rules[1]), "~resist(clare).");
    auto again = parse_or_throw(render(p));
    EXPECT_EQ(again, p);
}

TEST(RoundTrip, Corpus) {
    auto files = corpus_files();
    ASSERT_GE(files.size(), 6u);
    for (const auto& f : files) {
        SCOPED_TRACE(f.string());
        auto p = parse_or_throw(read_text(f), f.string());
        std::string text = render(p);
        auto q = parse_or_throw(text, "rendered");
        EXPECT_EQ(q, p);
        EXPECT_EQ(render(q), text);
    }
}

// Random programs, including labels and arithmetic, survive render/parse.
TEST(RoundTrip, GeneratedPrograms) {
    std::mt19937 rng(7);
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const char* vars[] = {"X", "Y"};
    const char* consts[] = {"a", "b", "0", "-3", "17", "\"t x\""};
    const char* ops[] = {"=", "!=", "<", "<=", ">", ">="};
    const char* ariths[] = {"+", "-", "*", "/"};
    for (int i = 0; i < 300; ++i) {
        std::string src;
        int rules = pick(1, 5);
        for (int r = 0; r < rules; ++r) {
            std::string v = vars[pick(0, 1)];
            std::string atom = "b" + std::to_string(pick(0, 2)) + "(" + v + ")";
            std::string body = atom;
            int extra = pick(0, 3);
            for (int e = 0; e < extra; ++e) {
                switch (pick(0, 3)) {
                    case 0: body += ", not c" + std::to_string(pick(0, 2)) + "(" + v + ")"; break;
                    case 1: body += ", ~d(" + v + ")"; break;
                    case 2:
                        body += ", f(" + v + ")" + ops[pick(0, 5)] + consts[pick(0, 4)] + ariths[pick(0, 3)] + "2";
                        break;
                    default: body += ", " + v + ops[pick(0, 5)] + consts[pick(0, 5)]; break;
                }
            }
            std::string head;
            switch (pick(0, 4)) {
                case 0: head = "h(" + v + ")"; break;
                case 1: head = "~h(" + v + ")"; break;
                case 2: head = "g(" + v + ") := " + consts[pick(0, 5)]; break;
                case 3: head = "g(" + v + ") ^= " + consts[pick(0, 5)]; break;
                default: head = "s(" + v + ") := #sum{ w(" + v + ",K) : k(K) }"; break;
            }
            std::string label = pick(0, 2) == 0 ? "\"%" + v + " \\t[%%]\" :: " : "";
            src += label + head + " :- " + body + ".\n";
        }
        SCOPED_TRACE(src);
        auto p = parse_or_throw(src);
        auto q = parse_or_throw(render(p));
        EXPECT_EQ(q, p);
        EXPECT_EQ(render(q), render(p));
    }
}
