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
#include <liver/records.hpp>
#include <liver/report.hpp>
#include <liver/service.hpp>
#include <liver/store.hpp>
#include <lppf/render.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text) || !out.flush()) throw std::runtime_error("cannot write " + path);
}

std::string data_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("LIVER_DATA_DIR")) return env;
    return "liver-data";
}

// A classifier document path, or an id from the data directory, or the
// built-in soft-fragment.
liver::Classifier load_classifier(const std::string& ref, const std::string& dir) {
    if (fs::is_regular_file(ref)) return liver::classifier_from_json(nlohmann::json::parse(read_file(ref)));
    if (liver::is_safe_id(ref) && fs::is_directory(fs::path(dir) / "classifiers")) {
        liver::Store store(dir);
        if (auto c = store.classifier(ref)) return *c;
    }
    if (ref == "soft-fragment") return liver::soft_fragment();
    throw std::runtime_error("no classifier file or id '" + ref + "'");
}

liver::Schema load_schema(const std::string& path) {
    if (path.empty()) return liver::Schema::canonical();
    return liver::schema_from_json(nlohmann::json::parse(read_file(path)));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"liverlp: SOFT-style risk scoring of transplant records"};
    app.require_subcommand(1);
    std::string schema_path, dir;
    app.add_option("--schema", schema_path, "Attribute schema document (default: built-in)")->check(CLI::ExistingFile);
    app.add_option("--data-dir", dir, "Store directory for classifier ids (default: $LIVER_DATA_DIR or ./liver-data)");

    std::string classifier_ref = "soft-fragment", records_path, report_path, format = "text";
    std::optional<std::int64_t> only_case;
    auto* run = app.add_subcommand("run", "Score records with a classifier and print the explanations");
    run->add_option("--classifier", classifier_ref, "Classifier document or id")->capture_default_str();
    run->add_option("--records", records_path, "Records (.csv or .json)")->required()->check(CLI::ExistingFile);
    run->add_option("--report", report_path, "Also write an HTML report here");
    run->add_option("--case", only_case, "Only this case id");
    run->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));

    std::size_t n = 76;
    std::uint64_t seed = 42;
    std::string out_path;
    auto* synth = app.add_subcommand("synth", "Write a deterministic synthetic dataset");
    synth->add_option("--n", n, "Number of cases")->capture_default_str();
    synth->add_option("--seed", seed, "Random seed")->capture_default_str();
    synth->add_option("--out", out_path, "Output file (.json for the structured form, CSV otherwise)")->required();

    auto* compile = app.add_subcommand("compile", "Print the lppf program of a classifier");
    compile->add_option("--classifier", classifier_ref, "Classifier document or id")->capture_default_str();

    auto* validate = app.add_subcommand("validate", "Report findings for a classifier");
    validate->add_option("--classifier", classifier_ref, "Classifier document or id")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        liver::Schema schema = load_schema(schema_path);
        if (*synth) {
            auto records = liver::synthesize(n, seed, schema);
            bool as_json = std::filesystem::path(out_path).extension() == ".json";
            write_file(out_path, as_json ? liver::to_json(records).dump(2) + "\n" : liver::to_csv(records, schema));
            return 0;
        }
        liver::Classifier c = load_classifier(classifier_ref, data_dir(dir));
        if (*validate) {
            auto findings = liver::validate(c, schema);
            for (const auto& f : findings) {
                std::cout << f.severity << ": " << f.code << ": " << f.message << "\n";
            }
            return liver::has_errors(findings) ? 1 : 0;
        }
        if (*compile) {
            std::cout << lppf::render(liver::compile(c, schema));
            return 0;
        }

        auto records = liver::load(records_path, schema);
        if (only_case) {
            std::erase_if(records, [&](const auto& r) { return r.case_id != *only_case; });
            if (records.empty()) {
                std::cerr << "liverlp: no case " << *only_case << " in " << records_path << "\n";
                return 1;
            }
        }
        auto results = liver::score_cases(c, schema, records);
        if (format == "json") {
            nlohmann::json list = nlohmann::json::array();
            for (const auto& r : results) list.push_back(liver::to_json(r));
            std::cout << list.dump(2) << "\n";
        } else {
            std::cout << liver::render_batch(results);
        }
        if (!report_path.empty()) {
            auto run_doc = liver::make_run(c, fs::path(records_path).stem().string(), results, liver::utc_now());
            write_file(report_path, liver::render_report(run_doc));
        }
        int failed = 0;
        for (const auto& r : results) {
            if (!r.error) continue;
            std::cerr << "liverlp: " << *r.error << "\n";
            ++failed;
        }
        return failed ? 1 : 0;
    } catch (const liver::ClassifierError& e) {
        std::cerr << "liverlp: " << e.what() << "\n";
        for (const auto& f : e.findings()) std::cerr << "  " << f.severity << ": " << f.code << ": " << f.message << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "liverlp: " << e.what() << "\n";
        return 1;
    }
}
