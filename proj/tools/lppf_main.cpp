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

#include <lppf/explain.hpp>
#include <lppf/ground.hpp>
#include <lppf/parser.hpp>
#include <lppf/render.hpp>
#include <lppf/solve.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kOk = 0;
constexpr int kInconsistent = 1;
constexpr int kBadInput = 2;

struct Options {
    std::vector<std::string> files;
    std::string explain;
    bool explain_all = false;
    std::string format = "text";
    std::string mode;
    bool no_prune = false;
    bool dump_ground = false;
};

std::string where(const std::optional<lppf::SourceSpan>& span) {
    if (!span) return "lppf";
    return span->origin + ":" + std::to_string(span->line) + ":" + std::to_string(span->column);
}

nlohmann::json assignments_json(const lppf::SolveResult& result, std::size_t answer) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& a : lppf::derived_assignments(result, answer)) {
        out.push_back({{"term", lppf::to_string(a.term)}, {"value", lppf::display_constant(a.value)}});
    }
    return out;
}

int run_solve(const Options& opt) {
    lppf::Program program;
    bool parse_failed = false;
    for (const auto& path : opt.files) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            std::cerr << path << ":0:0: cannot open file\n";
            return kBadInput;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        auto parsed = lppf::parse(ss.str(), path);
        for (const auto& d : parsed.errors) std::cerr << d.format() << "\n";
        parse_failed = parse_failed || !parsed.errors.empty();
        program.append(std::move(parsed.program));
    }
    if (parse_failed) return kBadInput;

    std::optional<std::pair<lppf::Term, lppf::Term>> query;
    if (!opt.explain.empty()) {
        try {
            query = lppf::parse_assignment(opt.explain);
        } catch (const lppf::ParseError& e) {
            for (const auto& d : e.errors()) std::cerr << d.format() << "\n";
            return kBadInput;
        }
    }

    lppf::GroundOptions gopts;
    gopts.prune = !opt.no_prune;
    try {
        auto ground = std::make_shared<const lppf::GroundProgram>(lppf::ground(program, gopts));
        if (opt.dump_ground) {
            std::cout << lppf::render(ground->to_program());
            return kOk;
        }
        auto result = lppf::solve(ground);
        for (const auto& d : result.diagnostics) std::cerr << "lppf: " << d << "\n";

        lppf::ExplainOptions eopts;
        eopts.mode = lppf::default_mode(result);
        if (opt.mode == "default") eopts.mode = lppf::ExplainMode::Default;
        if (opt.mode == "labeled") eopts.mode = lppf::ExplainMode::Labeled;

        bool directed = !ground->explain.empty();
        bool explaining = query || opt.explain_all || directed || opt.format == "dot";
        std::vector<std::vector<lppf::ExplanationSet>> per_answer;
        if (explaining) {
            for (std::size_t i = 0; i < result.answer_sets.size(); ++i) {
                std::vector<lppf::Assignment> targets;
                if (query) {
                    std::optional<lppf::Term> value;
                    // Without "=value" every value of the term is explained.
                    bool has_value = opt.explain.find('=') != std::string::npos;
                    if (has_value && !query->second.is_variable()) value = query->second;
                    targets = lppf::select_matching(result, i, query->first, value);
                } else if (opt.explain_all) {
                    targets = lppf::derived_assignments(result, i);
                } else {
                    targets = lppf::select_targets(result, i);
                }
                std::vector<lppf::ExplanationSet> sets;
                for (const auto& t : targets) sets.push_back(lppf::explain(t, result, i, eopts));
                per_answer.push_back(std::move(sets));
            }
        }

        if (opt.format == "json") {
            nlohmann::json answers = nlohmann::json::array();
            for (std::size_t i = 0; i < result.answer_sets.size(); ++i) {
                nlohmann::json a{{"assignments", assignments_json(result, i)}};
                if (explaining) a["explanations"] = lppf::to_json(per_answer[i])["explanations"];
                answers.push_back(std::move(a));
            }
            std::cout << nlohmann::json{{"answers", answers},
                                        {"solutions", result.answer_sets.size()},
                                        {"stratified", result.stratified}}
                             .dump(2)
                      << "\n";
        } else if (opt.format == "dot") {
            std::vector<lppf::ExplanationSet> all;
            for (auto& sets : per_answer) all.insert(all.end(), sets.begin(), sets.end());
            std::cout << lppf::render_dot(all);
        } else if (query) {
            // Conclusions first, then the requested trees.
            std::cout << lppf::render_answers(result);
            for (const auto& sets : per_answer) std::cout << "\n" << lppf::render_text(sets);
        } else if (explaining) {
            std::cout << lppf::render_answers(result, &per_answer);
        } else {
            std::cout << lppf::render_answers(result);
        }
        return result.answer_sets.empty() ? kInconsistent : kOk;
    } catch (const lppf::SolveError& e) {
        std::cerr << where(e.span()) << ": " << lppf::to_string(e.kind()) << ": " << e.what() << "\n";
        for (const auto& d : e.derivations()) std::cerr << "  " << d << "\n";
        return kInconsistent;
    } catch (const lppf::GroundError& e) {
        std::cerr << "lppf: " << e.what() << "\n";
        return kInconsistent;
    } catch (const lppf::ExplainError& e) {
        std::cerr << "lppf: " << e.what() << "\n";
        return kInconsistent;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lppf: logic programs with partial functions"};
    app.require_subcommand(1);
    Options opt;
    auto* solve = app.add_subcommand("solve", "Ground and solve programs, optionally explaining conclusions");
    solve->add_option("files", opt.files, "Program files")->required()->check(CLI::ExistingFile);
    auto* explain = solve->add_option("--explain", opt.explain, "Explain assignments matching e.g. 'sentence(gabriel)=prison'");
    auto* all = solve->add_flag("--explain-all", opt.explain_all, "Explain every derived assignment");
    explain->excludes(all);
    solve->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"text", "json", "dot"}));
    solve->add_option("--mode", opt.mode, "Explanation mode (default: labeled if the program has labels)")
        ->check(CLI::IsMember({"default", "labeled"}));
    solve->add_flag("--no-prune", opt.no_prune, "Ground over the whole universe instead of derivable tuples");
    solve->add_flag("--dump-ground", opt.dump_ground, "Print the ground program and stop");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kBadInput;
    }
    return run_solve(opt);
}
