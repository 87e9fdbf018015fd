// SPDX-License-Identifier: Apache-2.0

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "acpr/error.hpp"
#include "acpr/harness.hpp"
#include "json_util.hpp"

namespace acpr {

using nlohmann::json;

namespace detail {

void reject_unknown(const json& obj, const std::string& prefix,
                    std::initializer_list<std::string_view> known) {
  if (!obj.is_object()) throw ConfigError(key_name(prefix, "") + " must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    bool found = false;
    for (auto k : known) found = found || k == key;
    if (!found) throw ConfigError("unknown configuration key \"" + key_name(prefix, key) + "\"");
  }
}

std::string key_name(const std::string& prefix, std::string_view key) {
  if (prefix.empty()) return key.empty() ? "<root>" : std::string(key);
  if (key.empty()) return prefix;
  return prefix + "." + std::string(key);
}

double read_number(const json& v, const std::string& name) {
  if (!v.is_number()) throw ConfigError(name + " must be a number");
  return v.get<double>();
}

std::uint64_t read_unsigned(const json& v, const std::string& name) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    if (v.get<std::int64_t>() < 0) throw ConfigError(name + " must be non-negative");
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  throw ConfigError(name + " must be a non-negative integer");
}

std::string read_string(const json& v, const std::string& name) {
  if (!v.is_string()) throw ConfigError(name + " must be a string");
  return v.get<std::string>();
}

std::vector<std::size_t> read_sizes(const json& v, const std::string& name) {
  if (!v.is_array()) throw ConfigError(name + " must be an array of positive integers");
  std::vector<std::size_t> out;
  for (const auto& e : v) {
    const auto s = read_unsigned(e, name);
    if (s == 0) throw ConfigError(name + " entries must be positive");
    out.push_back(static_cast<std::size_t>(s));
  }
  return out;
}

void apply_physics(PhysicsConfig& p, const json& obj, const std::string& prefix) {
  reject_unknown(obj, prefix,
                 {"cart_mass", "pole_mass_1", "pole_mass_2", "pole_length_1", "pole_length_2",
                  "gravity", "force_magnitude", "track_half_length", "failure_angle",
                  "integration_substep", "control_interval", "cart_friction",
                  "pole_friction"});
  const auto num = [&](const char* key, double& dst) {
    if (obj.contains(key)) dst = read_number(obj.at(key), key_name(prefix, key));
  };
  num("cart_mass", p.cart_mass);
  num("pole_mass_1", p.pole_mass[0]);
  num("pole_mass_2", p.pole_mass[1]);
  num("pole_length_1", p.pole_length[0]);
  num("pole_length_2", p.pole_length[1]);
  num("gravity", p.gravity);
  num("force_magnitude", p.force_magnitude);
  num("track_half_length", p.track_half_length);
  num("failure_angle", p.failure_angle);
  num("integration_substep", p.integration_substep);
  num("control_interval", p.control_interval);
  num("cart_friction", p.cart_friction);
  num("pole_friction", p.pole_friction);
}

void apply_agent(AgentConfig& a, const json& obj, const std::string& prefix) {
  reject_unknown(obj, prefix,
                 {"gamma", "actor_lr", "critic_lr", "temperature", "actor_hidden",
                  "critic_hidden"});
  const auto num = [&](const char* key, double& dst) {
    if (obj.contains(key)) dst = read_number(obj.at(key), key_name(prefix, key));
  };
  num("gamma", a.gamma);
  num("actor_lr", a.actor_lr);
  num("critic_lr", a.critic_lr);
  num("temperature", a.temperature);
  if (obj.contains("actor_hidden"))
    a.actor_hidden = read_sizes(obj.at("actor_hidden"), key_name(prefix, "actor_hidden"));
  if (obj.contains("critic_hidden"))
    a.critic_hidden = read_sizes(obj.at("critic_hidden"), key_name(prefix, "critic_hidden"));
}

void apply_rehearsal(RehearsalConfig& r, const json& obj, const std::string& prefix) {
  reject_unknown(obj, prefix,
                 {"strategy", "pseudo_count", "reinit_every", "ortho_exponent", "apply_to"});
  if (obj.contains("strategy")) {
    const auto name = key_name(prefix, "strategy");
    r.strategy = parse_strategy(read_string(obj.at("strategy"), name));
  }
  if (obj.contains("pseudo_count"))
    r.pseudo_count = read_unsigned(obj.at("pseudo_count"), key_name(prefix, "pseudo_count"));
  if (obj.contains("reinit_every")) {
    const auto name = key_name(prefix, "reinit_every");
    r.reinit_every = read_unsigned(obj.at("reinit_every"), name);
    if (r.reinit_every < 1) throw ConfigError(name + " must be at least 1");
  }
  if (obj.contains("ortho_exponent"))
    r.ortho_exponent = read_number(obj.at("ortho_exponent"), key_name(prefix, "ortho_exponent"));
  if (obj.contains("apply_to"))
    r.apply_to = parse_apply_to(read_string(obj.at("apply_to"), key_name(prefix, "apply_to")));
}

json physics_json(const PhysicsConfig& p) {
  return {{"cart_mass", p.cart_mass},
          {"pole_mass_1", p.pole_mass[0]},
          {"pole_mass_2", p.pole_mass[1]},
          {"pole_length_1", p.pole_length[0]},
          {"pole_length_2", p.pole_length[1]},
          {"gravity", p.gravity},
          {"force_magnitude", p.force_magnitude},
          {"track_half_length", p.track_half_length},
          {"failure_angle", p.failure_angle},
          {"integration_substep", p.integration_substep},
          {"control_interval", p.control_interval},
          {"cart_friction", p.cart_friction},
          {"pole_friction", p.pole_friction}};
}

json rehearsal_json(const RehearsalConfig& r) {
  return {{"strategy", to_string(r.strategy)},
          {"pseudo_count", r.pseudo_count},
          {"reinit_every", r.reinit_every},
          {"ortho_exponent", r.ortho_exponent},
          {"apply_to", to_string(r.apply_to)}};
}

json config_json(const ExperimentConfig& c) {
  json agent = {{"gamma", c.agent.gamma},
                {"actor_lr", c.agent.actor_lr},
                {"critic_lr", c.agent.critic_lr},
                {"temperature", c.agent.temperature},
                {"actor_hidden", c.agent.actor_hidden},
                {"critic_hidden", c.agent.critic_hidden}};
  return {{"physics", physics_json(c.physics)},
          {"agent", std::move(agent)},
          {"rehearsal", rehearsal_json(c.rehearsal)},
          {"observation", to_string(c.observation)},
          {"episodes", c.episodes},
          {"max_steps_per_episode", c.max_steps_per_episode},
          {"seed", c.seed},
          {"output", c.output}};
}

void apply_config(ExperimentConfig& cfg, const json& doc) {
  reject_unknown(doc, "",
                 {"physics", "agent", "rehearsal", "observation", "episodes",
                  "max_steps_per_episode", "seed", "output"});
  if (doc.contains("physics")) apply_physics(cfg.physics, doc.at("physics"), "physics");
  if (doc.contains("agent")) apply_agent(cfg.agent, doc.at("agent"), "agent");
  if (doc.contains("rehearsal")) apply_rehearsal(cfg.rehearsal, doc.at("rehearsal"), "rehearsal");
  if (doc.contains("observation"))
    cfg.observation = parse_observation_mode(read_string(doc.at("observation"), "observation"));
  if (doc.contains("episodes")) cfg.episodes = read_unsigned(doc.at("episodes"), "episodes");
  if (doc.contains("max_steps_per_episode"))
    cfg.max_steps_per_episode =
        read_unsigned(doc.at("max_steps_per_episode"), "max_steps_per_episode");
  if (doc.contains("seed")) cfg.seed = read_unsigned(doc.at("seed"), "seed");
  if (doc.contains("output")) cfg.output = read_string(doc.at("output"), "output");
}

json parse_json_text(std::string_view text, const std::string& what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(what + ": malformed JSON: " + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace detail

using namespace detail;

void ExperimentConfig::validate() const {
  physics.validate();
  agent.validate();
  rehearsal.validate();
  if (episodes < 1) throw ConfigError("episodes must be at least 1");
  if (max_steps_per_episode < 1) throw ConfigError("max_steps_per_episode must be at least 1");
}

ExperimentConfig merge_config_json(const ExperimentConfig& base, std::string_view json_text) {
  ExperimentConfig cfg = base;
  apply_config(cfg, parse_json_text(json_text, "config"));
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_json(std::string_view json_text) {
  return merge_config_json(ExperimentConfig{}, json_text);
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_config_json(text);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string config_to_json(const ExperimentConfig& cfg) { return config_json(cfg).dump(2); }

std::string config_hash(const ExperimentConfig& cfg) {
  json j = config_json(cfg);
  j.erase("seed");
  j.erase("output");
  const std::string canonical = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

}  // namespace acpr
