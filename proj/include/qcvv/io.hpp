#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace qcvv {

/// Locale-independent decimal with 17 significant digits.
std::string format_number(double x);

/// Writes text atomically (temporary file then rename).
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

/// Canonical JSON text: sorted keys, 2-space indent, trailing newline.
std::string dump_json(const nlohmann::json& j);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace qcvv
