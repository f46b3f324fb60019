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

#include <liver/classifier.hpp>
#include <liver/records.hpp>

#include <json.hpp>

#include <filesystem>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace liver {

class StoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Dataset {
    std::string id;
    std::string name;
    std::string created;
    std::vector<TransplantRecord> records;
};

nlohmann::json to_json(const Dataset& dataset);
Dataset dataset_from_json(const nlohmann::json& doc, const Schema& schema);

/// Letters, digits, '-' and '_', at most 64 characters.
bool is_safe_id(const std::string& id);

/// One JSON document per entity under root/{classifiers,datasets,runs}.
/// Writes go to a temporary file that is renamed over the target, so a
/// reader never sees a partial document.
class Store {
public:
    explicit Store(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }
    bool empty() const;

    std::vector<Classifier> classifiers() const;
    std::optional<Classifier> classifier(const std::string& id) const;
    void put_classifier(const Classifier& classifier);
    bool remove_classifier(const std::string& id);

    std::vector<std::string> dataset_ids() const;
    std::optional<Dataset> dataset(const std::string& id, const Schema& schema) const;
    void put_dataset(const Dataset& dataset);

    /// Assigns the next run id (run-000001, ...), stores `doc` under it with
    /// "run_id" filled in, and returns the id.
    std::string add_run(nlohmann::json doc);
    /// The stored document text, unchanged.
    std::optional<std::string> run_text(const std::string& id) const;
    std::vector<std::string> run_ids() const;
    std::vector<std::string> runs_using(const std::string& classifier_id) const;

private:
    std::filesystem::path file(const char* kind, const std::string& id) const;
    std::vector<std::string> ids(const char* kind) const;
    std::optional<std::string> read(const char* kind, const std::string& id) const;
    void write(const char* kind, const std::string& id, const std::string& text);

    std::filesystem::path root_;
    mutable std::mutex mutex_;
};

}  // namespace liver
