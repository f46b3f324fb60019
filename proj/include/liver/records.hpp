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

#include <lppf/ast.hpp>

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace liver {

enum class AttributeKind { Integer, Boolean, Symbol };
enum class AttributeGroup { Donor, Recipient, Surgery };

const char* to_string(AttributeKind kind);
const char* to_string(AttributeGroup group);

struct AttributeSchema {
    std::string name;
    AttributeKind kind = AttributeKind::Integer;
    AttributeGroup group = AttributeGroup::Recipient;
    std::string unit;
    // Synthesizer hints.
    std::int64_t min = 0;
    std::int64_t max = 0;
    double p_true = 0.5;
    std::vector<std::string> symbols;
    double p_missing = 0.0;
};

struct Schema {
    std::vector<AttributeSchema> attributes;

    const AttributeSchema* find(const std::string& name) const;

    /// bmi, donor_age, cold_ischemia_h and the four Boolean pretransplant /
    /// donor conditions.
    static Schema canonical();
};

using Value = std::variant<std::int64_t, bool, std::string>;

std::string to_string(const Value& value);

struct TransplantRecord {
    std::int64_t case_id = 0;
    std::map<std::string, Value> values;

    friend bool operator==(const TransplantRecord&, const TransplantRecord&) = default;
};

class RecordError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Comma-separated, header row first, `case_id` column required, empty cell =
/// missing, Booleans as true/false.
std::vector<TransplantRecord> load_csv(std::istream& in, const Schema& schema);
std::string to_csv(const std::vector<TransplantRecord>& records, const Schema& schema);

/// Structured form: [{"case_id": 686, "values": {"donor_age": 65, ...}}, ...]
std::vector<TransplantRecord> records_from_json(const nlohmann::json& doc, const Schema& schema);
nlohmann::json to_json(const std::vector<TransplantRecord>& records);
nlohmann::json to_json(const TransplantRecord& record);

/// Loads `.csv` or `.json` files by extension.
std::vector<TransplantRecord> load(const std::string& path, const Schema& schema);

Schema schema_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const Schema& schema);

/// Problems with a dataset against a schema; empty when it is well formed.
std::vector<std::string> check_records(const std::vector<TransplantRecord>& records, const Schema& schema);

/// `a(id):=v.` for integers and symbols, `a(id).` / `~a(id).` for Booleans,
/// nothing for missing values, then `case(id).`
lppf::Program to_facts(const TransplantRecord& record, const Schema& schema);

/// Deterministic synthetic dataset. When n >= 2 it includes cases 686 and 763
/// with the attribute patterns of the two reference SOFT examples.
std::vector<TransplantRecord> synthesize(std::size_t n, std::uint64_t seed, const Schema& schema = Schema::canonical());

}  // namespace liver
