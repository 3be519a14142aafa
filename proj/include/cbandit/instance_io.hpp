#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "cbandit/cbn.hpp"

namespace cbandit {

inline constexpr const char* kInstanceFormat = "cbandit-instance";
inline constexpr int kInstanceVersion = 1;

nlohmann::json instance_to_json(const Cbn& cbn);
// Throws ParseError on malformed documents and StructuralError on invalid
// models.
Cbn instance_from_json(const nlohmann::json& doc);

std::string dump_instance(const Cbn& cbn);
Cbn parse_instance(const std::string& text);

void save_instance(const Cbn& cbn, const std::filesystem::path& path);
Cbn load_instance(const std::filesystem::path& path);

}  // namespace cbandit
