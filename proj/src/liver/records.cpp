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

#include <liver/records.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <random>
#include <set>
#include <sstream>

namespace liver {

const char* to_string(AttributeKind kind) {
    switch (kind) {
        case AttributeKind::Integer: return "integer";
        case AttributeKind::Boolean: return "boolean";
        case AttributeKind::Symbol: return "symbol";
    }
    return "?";
}

const char* to_string(AttributeGroup group) {
    switch (group) {
        case AttributeGroup::Donor: return "donor";
        case AttributeGroup::Recipient: return "recipient";
        case AttributeGroup::Surgery: return "surgery";
    }
    return "?";
}

const AttributeSchema* Schema::find(const std::string& name) const {
    for (const auto& a : attributes) {
        if (a.name == name) return &a;
    }
    return nullptr;
}

Schema Schema::canonical() {
    using K = AttributeKind;
    using G = AttributeGroup;
    Schema s;
    s.attributes = {
        {"bmi", K::Integer, G::Recipient, "kg/m2", 18, 42, 0.5, {}, 0.05},
        {"donor_age", K::Integer, G::Donor, "years", 10, 80, 0.5, {}, 0.0},
        {"cold_ischemia_h", K::Integer, G::Surgery, "hours", 2, 12, 0.5, {}, 0.05},
        {"icu_pretransplant", K::Boolean, G::Recipient, "", 0, 0, 0.1, {}, 0.0},
        {"life_support_pretransplant", K::Boolean, G::Recipient, "", 0, 0, 0.05, {}, 0.0},
        {"portal_vein_thrombosis", K::Boolean, G::Recipient, "", 0, 0, 0.1, {}, 0.0},
        {"donor_cerebral_vascular_accident", K::Boolean, G::Donor, "", 0, 0, 0.4, {}, 0.0},
    };
    return s;
}

std::string to_string(const Value& value) {
    if (const auto* i = std::get_if<std::int64_t>(&value)) return std::to_string(*i);
    if (const auto* b = std::get_if<bool>(&value)) return *b ? "true" : "false";
    return std::get<std::string>(value);
}

namespace {

bool is_symbol(const std::string& s) {
    if (s.empty() || !(s[0] >= 'a' && s[0] <= 'z')) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::optional<std::int64_t> parse_int(const std::string& s) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(trim(cell));
            cell.clear();
        } else {
            cell += c;
        }
    }
    cells.push_back(trim(cell));
    return cells;
}

Value parse_cell(const std::string& cell, const AttributeSchema& attr, const std::string& where) {
    switch (attr.kind) {
        case AttributeKind::Integer:
            if (auto v = parse_int(cell)) return *v;
            throw RecordError(where + ": expected an integer for " + attr.name + ", got '" + cell + "'");
        case AttributeKind::Boolean:
            if (cell == "true") return true;
            if (cell == "false") return false;
            throw RecordError(where + ": expected true or false for " + attr.name + ", got '" + cell + "'");
        case AttributeKind::Symbol:
            if (is_symbol(cell)) return cell;
            throw RecordError(where + ": expected a lowercase symbol for " + attr.name + ", got '" + cell + "'");
    }
    return cell;
}

Value value_from_json(const nlohmann::json& j, const AttributeSchema& attr, const std::string& where) {
    switch (attr.kind) {
        case AttributeKind::Integer:
            if (j.is_number_integer()) return j.get<std::int64_t>();
            break;
        case AttributeKind::Boolean:
            if (j.is_boolean()) return j.get<bool>();
            break;
        case AttributeKind::Symbol:
            if (j.is_string() && is_symbol(j.get<std::string>())) return j.get<std::string>();
            break;
    }
    throw RecordError(where + ": value " + j.dump() + " does not match " + to_string(attr.kind) + " attribute " +
                      attr.name);
}

void check_duplicates(const std::vector<TransplantRecord>& records) {
    std::set<std::int64_t> seen;
    for (const auto& r : records) {
        if (!seen.insert(r.case_id).second) throw RecordError("duplicate case_id " + std::to_string(r.case_id));
    }
}

}  // namespace

std::vector<TransplantRecord> load_csv(std::istream& in, const Schema& schema) {
    std::string line;
    std::vector<TransplantRecord> out;
    if (!std::getline(in, line)) return out;
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    auto header = split_csv_line(line);
    std::vector<const AttributeSchema*> columns;
    std::optional<std::size_t> id_column;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "case_id") {
            id_column = i;
            columns.push_back(nullptr);
            continue;
        }
        const AttributeSchema* a = schema.find(header[i]);
        if (!a) throw RecordError("line 1: unknown column '" + header[i] + "'");
        columns.push_back(a);
    }
    if (!id_column) throw RecordError("line 1: missing case_id column");

    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw RecordError("line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                              " cells, got " + std::to_string(cells.size()));
        }
        TransplantRecord r;
        auto id = parse_int(cells[*id_column]);
        if (!id) throw RecordError("line " + std::to_string(lineno) + ": invalid case_id '" + cells[*id_column] + "'");
        r.case_id = *id;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (!columns[i] || cells[i].empty()) continue;
            std::string where = "line " + std::to_string(lineno) + ", column " + header[i];
            r.values.emplace(columns[i]->name, parse_cell(cells[i], *columns[i], where));
        }
        out.push_back(std::move(r));
    }
    check_duplicates(out);
    return out;
}

std::string to_csv(const std::vector<TransplantRecord>& records, const Schema& schema) {
    std::string out = "case_id";
    for (const auto& a : schema.attributes) out += "," + a.name;
    out += "\n";
    for (const auto& r : records) {
        out += std::to_string(r.case_id);
        for (const auto& a : schema.attributes) {
            out += ",";
            auto it = r.values.find(a.name);
            if (it != r.values.end()) out += to_string(it->second);
        }
        out += "\n";
    }
    return out;
}

std::vector<TransplantRecord> records_from_json(const nlohmann::json& doc, const Schema& schema) {
    if (!doc.is_array()) throw RecordError("records must be a list");
    std::vector<TransplantRecord> out;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& item = doc[i];
        std::string where = "record " + std::to_string(i);
        if (!item.is_object() || !item.contains("case_id") || !item["case_id"].is_number_integer()) {
            throw RecordError(where + ": missing integer case_id");
        }
        TransplantRecord r;
        r.case_id = item["case_id"].get<std::int64_t>();
        if (item.contains("values")) {
            if (!item["values"].is_object()) throw RecordError(where + ": values must be an object");
            for (const auto& [name, v] : item["values"].items()) {
                const AttributeSchema* a = schema.find(name);
                if (!a) throw RecordError(where + ": unknown attribute '" + name + "'");
                if (v.is_null()) continue;
                r.values.emplace(name, value_from_json(v, *a, where));
            }
        }
        out.push_back(std::move(r));
    }
    check_duplicates(out);
    return out;
}

nlohmann::json to_json(const TransplantRecord& record) {
    nlohmann::json values = nlohmann::json::object();
    for (const auto& [k, v] : record.values) {
        std::visit([&](const auto& x) { values[k] = x; }, v);
    }
    return {{"case_id", record.case_id}, {"values", std::move(values)}};
}

nlohmann::json to_json(const std::vector<TransplantRecord>& records) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : records) out.push_back(to_json(r));
    return out;
}

std::vector<TransplantRecord> load(const std::string& path, const Schema& schema) {
    std::ifstream in(path);
    if (!in) throw RecordError("cannot open " + path);
    auto ends_with = [&](const std::string& suffix) {
        return path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    if (ends_with(".json")) {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw RecordError(path + ": " + e.what());
        }
        if (doc.is_object() && doc.contains("records")) return records_from_json(doc["records"], schema);
        return records_from_json(doc, schema);
    }
    return load_csv(in, schema);
}

Schema schema_from_json(const nlohmann::json& doc) {
    const auto& list = doc.is_object() && doc.contains("attributes") ? doc["attributes"] : doc;
    if (!list.is_array()) throw RecordError("schema must list attributes");
    Schema s;
    std::set<std::string> names;
    for (const auto& a : list) {
        AttributeSchema attr;
        try {
            attr.name = a.at("name").get<std::string>();
            std::string kind = a.value("kind", "integer");
            if (kind == "integer") {
                attr.kind = AttributeKind::Integer;
            } else if (kind == "boolean") {
                attr.kind = AttributeKind::Boolean;
            } else if (kind == "symbol") {
                attr.kind = AttributeKind::Symbol;
            } else {
                throw RecordError("attribute " + attr.name + ": unknown kind '" + kind + "'");
            }
            std::string group = a.value("group", "recipient");
            if (group == "donor") {
                attr.group = AttributeGroup::Donor;
            } else if (group == "recipient") {
                attr.group = AttributeGroup::Recipient;
            } else if (group == "surgery") {
                attr.group = AttributeGroup::Surgery;
            } else {
                throw RecordError("attribute " + attr.name + ": unknown group '" + group + "'");
            }
            attr.unit = a.value("unit", "");
            attr.min = a.value("min", std::int64_t{0});
            attr.max = a.value("max", attr.min);
            attr.p_true = a.value("p_true", 0.5);
            attr.symbols = a.value("symbols", std::vector<std::string>{});
            attr.p_missing = a.value("p_missing", 0.0);
        } catch (const nlohmann::json::exception& e) {
            throw RecordError(std::string("malformed schema entry: ") + e.what());
        }
        if (!is_symbol(attr.name) || attr.name == "case") {
            throw RecordError("attribute name '" + attr.name + "' must be a lowercase symbol other than 'case'");
        }
        if (!names.insert(attr.name).second) throw RecordError("duplicate attribute " + attr.name);
        if (attr.max < attr.min) throw RecordError("attribute " + attr.name + ": max below min");
        for (const auto& sym : attr.symbols) {
            if (!is_symbol(sym)) throw RecordError("attribute " + attr.name + ": invalid symbol '" + sym + "'");
        }
        s.attributes.push_back(std::move(attr));
    }
    return s;
}

nlohmann::json to_json(const Schema& schema) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& a : schema.attributes) {
        list.push_back({{"name", a.name},
                        {"kind", to_string(a.kind)},
                        {"group", to_string(a.group)},
                        {"unit", a.unit},
                        {"min", a.min},
                        {"max", a.max},
                        {"p_true", a.p_true},
                        {"symbols", a.symbols},
                        {"p_missing", a.p_missing}});
    }
    return {{"attributes", std::move(list)}};
}

std::vector<std::string> check_records(const std::vector<TransplantRecord>& records, const Schema& schema) {
    std::vector<std::string> findings;
    std::set<std::int64_t> seen;
    for (const auto& r : records) {
        std::string id = std::to_string(r.case_id);
        if (!seen.insert(r.case_id).second) findings.push_back("duplicate case_id " + id);
        for (const auto& [name, v] : r.values) {
            const AttributeSchema* a = schema.find(name);
            if (!a) {
                findings.push_back("case " + id + ": unknown attribute " + name);
                continue;
            }
            bool ok = (a->kind == AttributeKind::Integer && std::holds_alternative<std::int64_t>(v)) ||
                      (a->kind == AttributeKind::Boolean && std::holds_alternative<bool>(v)) ||
                      (a->kind == AttributeKind::Symbol && std::holds_alternative<std::string>(v) &&
                       is_symbol(std::get<std::string>(v)));
            if (!ok) findings.push_back("case " + id + ": " + name + " is not a valid " + to_string(a->kind));
        }
    }
    return findings;
}

lppf::Program to_facts(const TransplantRecord& record, const Schema& schema) {
    using lppf::Term;
    lppf::Program p;
    Term id = Term::integer(record.case_id);
    auto add = [&](lppf::RuleHead head) {
        lppf::Rule r;
        r.head = std::move(head);
        r.span.origin = "case " + std::to_string(record.case_id);
        p.rules.push_back(std::move(r));
    };
    for (const auto& a : schema.attributes) {
        auto it = record.values.find(a.name);
        if (it == record.values.end()) continue;
        Term target = Term::function(a.name, {id});
        const Value& v = it->second;
        if (const auto* b = std::get_if<bool>(&v)) {
            if (*b) {
                add(lppf::AssertHead{target});
            } else {
                add(lppf::DenyHead{target});
            }
        } else if (const auto* i = std::get_if<std::int64_t>(&v)) {
            add(lppf::AssignHead{target, lppf::Expression(Term::integer(*i))});
        } else {
            add(lppf::AssignHead{target, lppf::Expression(Term::symbol(std::get<std::string>(v)))});
        }
    }
    add(lppf::AssertHead{Term::function("case", {id})});
    return p;
}

namespace {

// Distributions are mapped by hand: the standard ones are implementation
// defined and would make datasets differ across standard libraries.
class Draw {
public:
    explicit Draw(std::uint64_t seed) : rng_(seed) {}

    double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
    bool chance(double p) { return unit() < p; }
    std::int64_t between(std::int64_t lo, std::int64_t hi) {
        auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(rng_() % span);
    }

private:
    std::mt19937_64 rng_;
};

TransplantRecord random_record(std::int64_t id, const Schema& schema, Draw& draw) {
    TransplantRecord r;
    r.case_id = id;
    for (const auto& a : schema.attributes) {
        if (draw.chance(a.p_missing)) continue;
        switch (a.kind) {
            case AttributeKind::Integer: r.values.emplace(a.name, draw.between(a.min, a.max)); break;
            case AttributeKind::Boolean: r.values.emplace(a.name, draw.chance(a.p_true)); break;
            case AttributeKind::Symbol:
                if (a.symbols.empty()) break;
                r.values.emplace(a.name, a.symbols[static_cast<std::size_t>(
                                             draw.between(0, static_cast<std::int64_t>(a.symbols.size()) - 1))]);
                break;
        }
    }
    return r;
}

void pin(TransplantRecord& r, const Schema& schema, const std::string& name, Value v) {
    if (schema.find(name)) r.values[name] = std::move(v);
}

}  // namespace

std::vector<TransplantRecord> synthesize(std::size_t n, std::uint64_t seed, const Schema& schema) {
    Draw draw(seed);
    std::vector<TransplantRecord> out;
    std::size_t randoms = n >= 2 ? n - 2 : n;
    std::int64_t next = 601;
    for (std::size_t i = 0; i < randoms; ++i) {
        while (next == 686 || next == 763) ++next;
        out.push_back(random_record(next++, schema, draw));
    }
    if (n >= 2) {
        TransplantRecord a;
        a.case_id = 686;
        pin(a, schema, "bmi", std::int64_t{28});
        pin(a, schema, "donor_age", std::int64_t{65});
        pin(a, schema, "cold_ischemia_h", std::int64_t{4});
        pin(a, schema, "icu_pretransplant", false);
        pin(a, schema, "life_support_pretransplant", false);
        pin(a, schema, "portal_vein_thrombosis", false);
        pin(a, schema, "donor_cerebral_vascular_accident", false);
        TransplantRecord b;
        b.case_id = 763;
        pin(b, schema, "bmi", std::int64_t{30});
        pin(b, schema, "donor_age", std::int64_t{45});
        pin(b, schema, "cold_ischemia_h", std::int64_t{9});
        pin(b, schema, "icu_pretransplant", true);
        pin(b, schema, "life_support_pretransplant", true);
        pin(b, schema, "portal_vein_thrombosis", true);
        pin(b, schema, "donor_cerebral_vascular_accident", true);
        out.push_back(std::move(a));
        out.push_back(std::move(b));
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.case_id < y.case_id; });
    return out;
}

}  // namespace liver
