// SPDX-License-Identifier: Apache-2.0

// Internal JSON helpers shared by the config, artifact and report code.

#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "acpr/harness.hpp"

namespace acpr::detail {

std::string key_name(const std::string& prefix, std::string_view key);
void reject_unknown(const nlohmann::json& obj, const std::string& prefix,
                    std::initializer_list<std::string_view> known);
double read_number(const nlohmann::json& v, const std::string& name);
std::uint64_t read_unsigned(const nlohmann::json& v, const std::string& name);
std::string read_string(const nlohmann::json& v, const std::string& name);

void apply_rehearsal(RehearsalConfig& r, const nlohmann::json& obj, const std::string& prefix);
void apply_config(ExperimentConfig& cfg, const nlohmann::json& doc);

nlohmann::json rehearsal_json(const RehearsalConfig& r);
nlohmann::json config_json(const ExperimentConfig& cfg);
nlohmann::json parse_json_text(std::string_view text, const std::string& what);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace acpr::detail
