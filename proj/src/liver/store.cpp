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

#include <liver/store.hpp>

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace liver {

namespace {

const char* const kClassifiers = "classifiers";
const char* const kDatasets = "datasets";
const char* const kRuns = "runs";

}  // namespace

bool is_safe_id(const std::string& id) {
    if (id.empty() || id.size() > 64) return false;
    return std::all_of(id.begin(), id.end(), [](char ch) {
        return std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_';
    });
}

nlohmann::json to_json(const Dataset& d) {
    return {{"id", d.id}, {"name", d.name}, {"created", d.created}, {"records", to_json(d.records)}};
}

Dataset dataset_from_json(const nlohmann::json& doc, const Schema& schema) {
    if (!doc.is_object() || !doc.contains("id") || !doc["id"].is_string()) {
        throw RecordError("dataset document needs a string id");
    }
    Dataset d;
    d.id = doc["id"].get<std::string>();
    d.name = doc.value("name", d.id);
    d.created = doc.value("created", "");
    if (doc.contains("records")) d.records = records_from_json(doc["records"], schema);
    return d;
}

Store::Store(fs::path root) : root_(std::move(root)) {
    for (const char* kind : {kClassifiers, kDatasets, kRuns}) fs::create_directories(root_ / kind);
}

bool Store::empty() const {
    for (const char* kind : {kClassifiers, kDatasets, kRuns}) {
        if (!ids(kind).empty()) return false;
    }
    return true;
}

fs::path Store::file(const char* kind, const std::string& id) const {
    if (!is_safe_id(id)) throw StoreError("invalid id '" + id + "'");
    return root_ / kind / (id + ".json");
}

std::vector<std::string> Store::ids(const char* kind) const {
    std::vector<std::string> out;
    for (const auto& entry : fs::directory_iterator(root_ / kind)) {
        const fs::path& p = entry.path();
        if (p.extension() != ".json") continue;
        std::string stem = p.stem().string();
        if (is_safe_id(stem)) out.push_back(stem);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<std::string> Store::read(const char* kind, const std::string& id) const {
    if (!is_safe_id(id)) return std::nullopt;
    std::ifstream in(file(kind, id), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void Store::write(const char* kind, const std::string& id, const std::string& text) {
    fs::path target = file(kind, id);
    fs::path temp = target;
    temp += ".tmp";
    int fd = ::open(temp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd < 0) throw StoreError("cannot write " + temp.string() + ": " + std::strerror(errno));
    const char* p = text.data();
    std::size_t left = text.size();
    while (left > 0) {
        ssize_t n = ::write(fd, p, left);
        if (n < 0) {
            if (errno == EINTR) continue;
            int err = errno;
            ::close(fd);
            throw StoreError("cannot write " + temp.string() + ": " + std::strerror(err));
        }
        p += n;
        left -= static_cast<std::size_t>(n);
    }
    ::fsync(fd);
    ::close(fd);
    fs::rename(temp, target);
}

std::vector<Classifier> Store::classifiers() const {
    std::vector<Classifier> out;
    for (const auto& id : ids(kClassifiers)) {
        if (auto c = classifier(id)) out.push_back(std::move(*c));
    }
    return out;
}

std::optional<Classifier> Store::classifier(const std::string& id) const {
    auto text = read(kClassifiers, id);
    if (!text) return std::nullopt;
    return classifier_from_json(nlohmann::json::parse(*text));
}

void Store::put_classifier(const Classifier& c) {
    std::lock_guard lock(mutex_);
    write(kClassifiers, c.id, to_json(c).dump(2) + "\n");
}

bool Store::remove_classifier(const std::string& id) {
    std::lock_guard lock(mutex_);
    if (!is_safe_id(id)) return false;
    return fs::remove(file(kClassifiers, id));
}

std::vector<std::string> Store::dataset_ids() const { return ids(kDatasets); }

std::optional<Dataset> Store::dataset(const std::string& id, const Schema& schema) const {
    auto text = read(kDatasets, id);
    if (!text) return std::nullopt;
    return dataset_from_json(nlohmann::json::parse(*text), schema);
}

void Store::put_dataset(const Dataset& d) {
    std::lock_guard lock(mutex_);
    write(kDatasets, d.id, to_json(d).dump(2) + "\n");
}

std::string Store::add_run(nlohmann::json doc) {
    std::lock_guard lock(mutex_);
    long last = 0;
    for (const auto& id : ids(kRuns)) {
        if (id.rfind("run-", 0) == 0) last = std::max(last, std::strtol(id.c_str() + 4, nullptr, 10));
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "run-%06ld", last + 1);
    std::string id = buf;
    doc["run_id"] = id;
    write(kRuns, id, doc.dump(2) + "\n");
    return id;
}

std::optional<std::string> Store::run_text(const std::string& id) const { return read(kRuns, id); }

std::vector<std::string> Store::run_ids() const { return ids(kRuns); }

std::vector<std::string> Store::runs_using(const std::string& classifier_id) const {
    std::vector<std::string> out;
    for (const auto& id : ids(kRuns)) {
        auto text = read(kRuns, id);
        if (!text) continue;
        auto doc = nlohmann::json::parse(*text, nullptr, false);
        if (doc.is_object() && doc.value("classifier_id", "") == classifier_id) out.push_back(id);
    }
    return out;
}

}  // namespace liver
