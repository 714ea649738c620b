#include "budgetmech/model_io.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace budgetmech {

using json = nlohmann::ordered_json;

namespace {

Rat field_rat(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string()) {
        throw std::invalid_argument(std::string("missing or non-string field '") + key + "'");
    }
    return parse_rat(j[key].get<std::string>());
}

}  // namespace

json distribution_to_json(const BuyerDistribution& d) {
    json j;
    j["label"] = d.label();
    j["types"] = json::array();
    for (const auto& t : d.points()) {
        json row;
        row["v"] = rat_str(t.v);
        row["w"] = rat_str(t.w);
        row["prob"] = rat_str(t.prob);
        j["types"].push_back(row);
    }
    return j;
}

BuyerDistribution distribution_from_json(const json& j) {
    if (!j.contains("types") || !j["types"].is_array()) {
        throw std::invalid_argument("distribution file: missing 'types' array");
    }
    std::vector<TypePoint> pts;
    for (const auto& row : j["types"]) {
        pts.push_back({field_rat(row, "v"), field_rat(row, "w"), field_rat(row, "prob")});
    }
    return BuyerDistribution(std::move(pts), j.value("label", std::string{}));
}

json mechanism_to_json(const Mechanism& m, const std::string& label) {
    json j;
    j["label"] = label;
    j["types"] = json::array();
    for (const auto& [t, l] : m.entries()) {
        json row;
        row["v"] = rat_str(t.v);
        row["w"] = rat_str(t.w);
        row["q"] = rat_str(l.q());
        row["p"] = rat_str(l.p());
        j["types"].push_back(row);
    }
    return j;
}

Mechanism mechanism_from_json(const json& j) {
    if (!j.contains("types") || !j["types"].is_array()) {
        throw std::invalid_argument("mechanism file: missing 'types' array");
    }
    std::vector<std::pair<TypePoint, Lottery>> entries;
    for (const auto& row : j["types"]) {
        TypePoint t{field_rat(row, "v"), field_rat(row, "w"), Rat(0)};
        entries.emplace_back(t, Lottery(field_rat(row, "q"), field_rat(row, "p")));
    }
    return Mechanism(std::move(entries));
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error("bad JSON in '" + path + "': " + e.what());
    }
    return j;
}

BuyerDistribution load_distribution(const std::string& path) {
    return distribution_from_json(read_json_file(path));
}

Mechanism load_mechanism(const std::string& path) {
    return mechanism_from_json(read_json_file(path));
}

void write_text_file(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
        out << text;
        if (!out) throw std::runtime_error("short write to '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw std::runtime_error("cannot rename '" + tmp + "' to '" + path + "'");
    }
}

void write_json_file(const std::string& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace budgetmech
