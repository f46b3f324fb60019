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

#include "oracle/oracle.hpp"

#include <lppf/explain.hpp>
#include <lppf/ground.hpp>
#include <lppf/parser.hpp>
#include <lppf/solve.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace testing_support {

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::filesystem::path corpus(const std::string& name) { return std::filesystem::path(LPPF_CORPUS_DIR) / name; }

inline std::vector<std::filesystem::path> corpus_files() {
    std::vector<std::filesystem::path> out;
    for (const auto& e : std::filesystem::directory_iterator(LPPF_CORPUS_DIR)) {
        if (e.path().extension() == ".lppf") out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline lppf::SolveResult solve_text(const std::string& source, const lppf::GroundOptions& options = {}) {
    return lppf::solve(lppf::ground(lppf::parse_or_throw(source), options));
}

/// Scratch directory removed on destruction.
struct TempDir {
    std::filesystem::path path;
    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "lppf-test-XXXXXX").string();
        path = mkdtemp(tmpl.data());
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

/// Valuation of an interpreter answer set in the oracle's encoding.
inline oracle::Model to_model(const oracle::Program& p, const lppf::Valuation& v) {
    oracle::Model m(p.terms.size(), oracle::kUndefined);
    for (std::size_t i = 0; i < p.terms.size(); ++i) {
        auto it = v.find(lppf::parse_assignment(p.terms[i].name).first);
        if (it == v.end()) continue;
        std::string value = lppf::to_string(it->second);
        auto pos = std::find(p.terms[i].values.begin(), p.terms[i].values.end(), value);
        m[i] = pos == p.terms[i].values.end() ? -2 : static_cast<int>(pos - p.terms[i].values.begin());
    }
    return m;
}

inline lppf::Valuation to_valuation(const oracle::Program& p, const oracle::Model& m) {
    lppf::Valuation v;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] == oracle::kUndefined) continue;
        v.emplace(lppf::parse_assignment(p.terms[i].name).first, lppf::Term::symbol(p.terms[i].values[m[i]]));
    }
    return v;
}

struct OracleComparison {
    bool agree = true;
    std::string detail;
};

/// solve() against (a) the oracle's brute force and (b) check_stable over
/// every valuation. Inconsistency errors count as "no model".
inline OracleComparison compare_with_oracle(const oracle::Program& p) {
    OracleComparison out;
    auto expected = oracle::stable_models(p);
    std::sort(expected.begin(), expected.end());

    auto ground = lppf::ground(lppf::parse_or_throw(p.source()));
    std::vector<oracle::Model> by_check;
    for (const auto& m : oracle::all_valuations(p)) {
        if (lppf::check_stable(ground, to_valuation(p, m))) by_check.push_back(m);
    }
    std::sort(by_check.begin(), by_check.end());

    std::vector<oracle::Model> got;
    std::string error;
    try {
        auto result = lppf::solve(ground);
        for (const auto& a : result.answer_sets) got.push_back(to_model(p, a.valuation));
    } catch (const lppf::SolveError& e) {
        error = std::string(lppf::to_string(e.kind())) + ": " + e.what();
        if (e.kind() == lppf::SolveError::Kind::NonStratifiedOverflow || e.kind() == lppf::SolveError::Kind::Evaluation) {
            out.agree = false;
        }
    }
    std::sort(got.begin(), got.end());
    if (got != expected || by_check != expected) out.agree = false;
    if (!out.agree) {
        std::string s = "program:\n" + p.source() + "oracle:";
        for (const auto& m : expected) s += " " + oracle::describe(p, m);
        s += "\ncheck_stable:";
        for (const auto& m : by_check) s += " " + oracle::describe(p, m);
        s += "\nsolve:";
        for (const auto& m : got) s += " " + oracle::describe(p, m);
        if (!error.empty()) s += " (" + error + ")";
        out.detail = s;
    }
    return out;
}

}  // namespace testing_support
