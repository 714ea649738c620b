#pragma once

#include "budgetmech/types.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>

namespace budgetmech {

/// Distribution file format:
///   {"label": "...", "types": [{"v": "a/b", "w": "a/b", "prob": "a/b"}, ...]}
/// Rationals travel as strings and are normalized to lowest terms on load,
/// so write(read(x)) is byte-stable.
nlohmann::ordered_json distribution_to_json(const BuyerDistribution& d);
BuyerDistribution distribution_from_json(const nlohmann::ordered_json& j);

/// Mechanism file format mirrors the distribution format with "q"/"p":
///   {"label": "...", "types": [{"v": ..., "w": ..., "q": ..., "p": ...}, ...]}
nlohmann::ordered_json mechanism_to_json(const Mechanism& m, const std::string& label);
Mechanism mechanism_from_json(const nlohmann::ordered_json& j);

BuyerDistribution load_distribution(const std::string& path);
Mechanism load_mechanism(const std::string& path);

/// Serialized with a trailing newline; parent directory must exist.
/// Writes to a temp file in the same directory, then renames.
void write_json_file(const std::string& path, const nlohmann::ordered_json& j);
nlohmann::ordered_json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace budgetmech
