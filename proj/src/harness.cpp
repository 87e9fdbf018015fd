// SPDX-License-Identifier: Apache-2.0

#include "acpr/harness.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "acpr/error.hpp"
#include "acpr/random.hpp"
#include "json_util.hpp"

namespace acpr {

using nlohmann::json;
using namespace detail;
namespace fs = std::filesystem;

namespace {

// Independent random streams of one run.
enum Stream : std::uint64_t {
  kActorInit = 1,
  kCriticInit = 2,
  kInitialState = 3,
  kPolicy = 4,
  kRehearsal = 5,
};

std::int64_t elapsed_ns(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now() - since)
      .count();
}

void prepare_output_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  const fs::path probe = dir / ".write_probe";
  {
    std::ofstream out(probe, std::ios::trunc);
    if (!out || !(out << "ok") || !out.flush())
      throw IoError("output directory " + dir.string() + " is not writable");
  }
  fs::remove(probe, ec);
}

json summary_json(const SummaryStats& s) {
  return {{"mean", s.mean},
          {"median", s.median},
          {"rmsd", s.rmsd},
          {"step_volatility", s.step_volatility}};
}

}  // namespace

std::string_view to_string(TerminalCause c) noexcept {
  switch (c) {
    case TerminalCause::pole_1: return "pole_1";
    case TerminalCause::pole_2: return "pole_2";
    case TerminalCause::track: return "track";
    case TerminalCause::step_limit: return "step_limit";
  }
  return "?";
}

TerminalCause parse_terminal_cause(std::string_view text) {
  if (text == "pole_1") return TerminalCause::pole_1;
  if (text == "pole_2") return TerminalCause::pole_2;
  if (text == "track") return TerminalCause::track;
  if (text == "step_limit") return TerminalCause::step_limit;
  throw ConfigError("unknown terminal cause \"" + std::string(text) + "\"");
}

CartPoleState initial_state(std::uint64_t run_seed, std::size_t episode_index) {
  Rng rng(derive_seed(run_seed, kInitialState, episode_index));
  CartPoleState s;
  for (auto& pole : s.poles) pole.theta = uniform(rng, -kInitialAngleSpread, kInitialAngleSpread);
  return s;
}

// --- Trainer -------------------------------------------------------------------

Trainer::Trainer(const ExperimentConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  agent_ = make_agent(cfg_.agent, observation_size(cfg_.observation),
                      derive_seed(cfg_.seed, kActorInit), derive_seed(cfg_.seed, kCriticInit));
  rule_ = make_update_rule(cfg_.rehearsal, buffer_);
}

EpisodeRecord Trainer::run_episode(std::size_t episode_index) {
  const auto started = std::chrono::steady_clock::now();
  {
    Rng rng(derive_seed(cfg_.seed, kRehearsal, episode_index));
    maybe_reinitialize(buffer_, episode_index, cfg_.rehearsal, agent_.actor, agent_.critic, rng);
  }
  Rng policy_rng(derive_seed(cfg_.seed, kPolicy, episode_index));

  CartPoleState state = initial_state(cfg_.seed, episode_index);
  cache_passive_accelerations(state, cfg_.physics);
  std::vector<double> obs = encode_state(state, cfg_.observation).values;

  EpisodeRecord rec;
  rec.episode_index = episode_index;
  double abs_td_sum = 0.0;
  for (;;) {
    const auto probs = policy_probs(agent_.actor, obs, cfg_.agent.temperature);
    const Action action = sample_action(probs, policy_rng);
    StepResult r = step(state, action, cfg_.physics);
    ++rec.steps_survived;

    Transition t{std::move(obs), action, r.reward, std::nullopt};
    std::vector<double> next_obs;
    if (!r.terminal) {
      next_obs = encode_state(r.next, cfg_.observation).values;
      t.next_observation = next_obs;
    }
    abs_td_sum += std::abs(learn_step(agent_.actor, agent_.critic, t, cfg_.agent, *rule_));

    // Reaching the cap is reported as step_limit even if that last step failed.
    if (rec.steps_survived >= cfg_.max_steps_per_episode) {
      rec.terminal_cause = TerminalCause::step_limit;
      break;
    }
    if (r.terminal) {
      switch (*r.cause) {
        case FailureCause::pole_1: rec.terminal_cause = TerminalCause::pole_1; break;
        case FailureCause::pole_2: rec.terminal_cause = TerminalCause::pole_2; break;
        case FailureCause::track: rec.terminal_cause = TerminalCause::track; break;
      }
      break;
    }
    state = r.next;
    obs = std::move(next_obs);
  }
  rec.td_error_mean_abs = abs_td_sum / static_cast<double>(rec.steps_survived);
  rec.compute_ns = elapsed_ns(started);
  return rec;
}

// --- runs ------------------------------------------------------------------------

PerformanceVector RunArtifact::performance() const {
  PerformanceVector v;
  v.steps.reserve(episodes.size());
  v.compute_ns.reserve(episodes.size());
  for (const auto& e : episodes) {
    v.steps.push_back(e.steps_survived);
    v.compute_ns.push_back(e.compute_ns);
  }
  return v;
}

RunArtifact run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const bool persist = !cfg.output.empty();
  if (persist) prepare_output_dir(cfg.output);

  RunArtifact art;
  art.config = cfg;
  art.config_hash = config_hash(cfg);
  art.episodes.reserve(cfg.episodes);

  const auto started = std::chrono::steady_clock::now();
  Trainer trainer(cfg);
  try {
    for (std::size_t e = 0; e < cfg.episodes; ++e) art.episodes.push_back(trainer.run_episode(e));
  } catch (const Error& err) {
    art.total_wall_ns = elapsed_ns(started);
    art.error = "episode " + std::to_string(art.episodes.size()) + ": " + err.what();
    if (!art.episodes.empty()) art.summary = summarize(art.performance());
    if (persist) write_artifact(art, cfg.output);
    throw NumericError(*art.error);
  }
  art.total_wall_ns = elapsed_ns(started);
  art.summary = summarize(art.performance());

  if (persist) {
    write_artifact(art, cfg.output);
    const fs::path nets = fs::path(cfg.output) / kNetworksDir;
    std::error_code ec;
    fs::create_directories(nets, ec);
    if (ec) throw IoError("cannot create " + nets.string());
    std::ostringstream actor, critic;
    save_network(trainer.agent().actor, actor);
    save_network(trainer.agent().critic, critic);
    write_text_file(nets / "actor.txt", actor.str());
    write_text_file(nets / "critic.txt", critic.str());
  }
  return art;
}

// --- persistence ---------------------------------------------------------------

std::string results_csv(const RunArtifact& artifact) {
  std::string out = "episode,steps,terminal_cause,compute_ns\n";
  out.reserve(32 * (artifact.episodes.size() + 1));
  for (const auto& e : artifact.episodes) {
    out += std::to_string(e.episode_index);
    out += ',';
    out += std::to_string(e.steps_survived);
    out += ',';
    out += to_string(e.terminal_cause);
    out += ',';
    out += std::to_string(e.compute_ns);
    out += '\n';
  }
  return out;
}

void write_artifact(const RunArtifact& artifact, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_text_file(dir / kResultsFile, results_csv(artifact));

  json meta = {{"format", "acpr-run 1"},
               {"seed", artifact.config.seed},
               {"config_hash", artifact.config_hash},
               {"episodes", artifact.episodes.size()},
               {"total_wall_ns", artifact.total_wall_ns},
               {"summary", summary_json(artifact.summary)},
               {"config", config_json(artifact.config)}};
  meta["error"] = artifact.error ? json(*artifact.error) : json(nullptr);
  write_text_file(dir / kMetadataFile, meta.dump(2) + "\n");
}

std::vector<EpisodeRecord> parse_results_csv(std::string_view text) {
  std::vector<EpisodeRecord> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  const auto fail = [&](const std::string& why) -> ConfigError {
    return ConfigError("results.csv line " + std::to_string(line_no) + ": " + why);
  };
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != "episode,steps,terminal_cause,compute_ns") throw fail("unexpected header");
      continue;
    }
    if (line.empty()) continue;

    std::string_view fields[4];
    std::size_t start = 0;
    for (int f = 0; f < 4; ++f) {
      const std::size_t comma = f < 3 ? line.find(',', start) : line.size();
      if (comma == std::string_view::npos) throw fail("expected 4 fields");
      fields[f] = line.substr(start, comma - start);
      start = comma + 1;
    }
    if (fields[3].find(',') != std::string_view::npos) throw fail("expected 4 fields");

    EpisodeRecord r;
    const auto num = [&](std::string_view s, auto& dst) {
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), dst);
      if (ec != std::errc{} || p != s.data() + s.size())
        throw fail("bad number \"" + std::string(s) + "\"");
    };
    num(fields[0], r.episode_index);
    num(fields[1], r.steps_survived);
    try {
      r.terminal_cause = parse_terminal_cause(fields[2]);
    } catch (const ConfigError& e) {
      throw fail(e.what());
    }
    num(fields[3], r.compute_ns);
    out.push_back(r);
  }
  if (line_no == 0) throw ConfigError("results.csv is empty");
  return out;
}

RunArtifact load_artifact(const fs::path& path) {
  const fs::path csv = fs::is_directory(path) ? path / kResultsFile : path;
  const fs::path meta_path = csv.parent_path() / kMetadataFile;

  RunArtifact art;
  art.episodes = parse_results_csv(read_text_file(csv));
  if (fs::exists(meta_path)) {
    const json meta = parse_json_text(read_text_file(meta_path), meta_path.string());
    if (meta.contains("config")) apply_config(art.config, meta.at("config"));
    if (meta.contains("config_hash") && meta.at("config_hash").is_string())
      art.config_hash = meta.at("config_hash").get<std::string>();
    if (meta.contains("total_wall_ns") && meta.at("total_wall_ns").is_number())
      art.total_wall_ns = meta.at("total_wall_ns").get<std::int64_t>();
    if (meta.contains("error") && meta.at("error").is_string())
      art.error = meta.at("error").get<std::string>();
  }
  art.config.output = (fs::is_directory(path) ? path : csv.parent_path()).string();
  if (!art.episodes.empty()) art.summary = summarize(art.performance());
  return art;
}

// --- sweeps ------------------------------------------------------------------------

std::vector<RehearsalConfig> parse_grid_json(std::string_view json_text,
                                             const RehearsalConfig& base) {
  const json doc = parse_json_text(json_text, "grid");
  std::vector<RehearsalConfig> grid;
  if (doc.is_array()) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      RehearsalConfig r = base;
      apply_rehearsal(r, doc[i], "grid[" + std::to_string(i) + "]");
      r.validate();
      grid.push_back(r);
    }
  } else if (doc.is_object()) {
    reject_unknown(doc, "grid",
                   {"strategy", "pseudo_count", "reinit_every", "ortho_exponent", "apply_to"});
    std::vector<json> partial{json::object()};
    for (const auto& [key, values] : doc.items()) {
      const json options = values.is_array() ? values : json::array({values});
      if (options.empty()) throw ConfigError("grid." + key + " must not be empty");
      std::vector<json> next;
      for (const json& p : partial)
        for (const json& v : options) {
          json q = p;
          q[key] = v;
          next.push_back(std::move(q));
        }
      partial = std::move(next);
    }
    for (const json& p : partial) {
      RehearsalConfig r = base;
      apply_rehearsal(r, p, "grid");
      r.validate();
      grid.push_back(r);
    }
  } else {
    throw ConfigError("grid must be a JSON array or object");
  }
  if (grid.empty()) throw ConfigError("grid is empty");
  return grid;
}

std::vector<RehearsalConfig> parse_grid(const fs::path& path, const RehearsalConfig& base) {
  const std::string text = read_text_file(path);
  try {
    return parse_grid_json(text, base);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  const auto parse_one = [&](std::string_view s) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || p != s.data() + s.size())
      throw ConfigError("seeds: bad value \"" + std::string(s) + "\"");
    return v;
  };
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    const std::string_view item = text.substr(start, comma - start);
    if (const auto dots = item.find(".."); dots != std::string_view::npos) {
      const auto lo = parse_one(item.substr(0, dots));
      const auto hi = parse_one(item.substr(dots + 2));
      if (hi < lo) throw ConfigError("seeds: empty range \"" + std::string(item) + "\"");
      if (hi - lo >= 1000000) throw ConfigError("seeds: range too large");
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      seeds.push_back(parse_one(item));
    }
    start = comma + 1;
  }
  if (seeds.empty()) throw ConfigError("seeds: empty list");
  return seeds;
}

std::string rehearsal_label(const RehearsalConfig& r) {
  std::ostringstream s;
  s << to_string(r.strategy);
  if (r.strategy != Strategy::none) {
    s << "_p" << r.pseudo_count << "_r" << r.reinit_every;
    if (r.strategy == Strategy::ortho) s << "_e" << r.ortho_exponent;
    s << '_' << to_string(r.apply_to);
  }
  return s.str();
}

std::size_t SweepResult::failed() const noexcept {
  std::size_t n = 0;
  for (const auto& c : cells) n += c.error.has_value();
  return n;
}

SweepResult sweep(const ExperimentConfig& base, const std::vector<RehearsalConfig>& grid,
                  const std::vector<std::uint64_t>& seeds, const fs::path& out_dir,
                  unsigned threads) {
  if (grid.empty()) throw ConfigError("sweep: empty grid");
  if (seeds.empty()) throw ConfigError("sweep: empty seed list");
  base.validate();
  for (const auto& r : grid) r.validate();
  prepare_output_dir(out_dir);

  SweepResult result;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    char prefix[16];
    std::snprintf(prefix, sizeof prefix, "%02zu_", g);
    const std::string label = prefix + rehearsal_label(grid[g]);
    for (std::uint64_t seed : seeds) {
      SweepCell cell;
      cell.grid_index = g;
      cell.rehearsal = grid[g];
      cell.seed = seed;
      cell.label = label;
      cell.path = out_dir / label / ("seed_" + std::to_string(seed));
      result.cells.push_back(std::move(cell));
    }
  }

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, result.cells.size()));
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < result.cells.size(); i = next++) {
      SweepCell& cell = result.cells[i];
      try {
        ExperimentConfig cfg = base;
        cfg.rehearsal = cell.rehearsal;
        cfg.seed = cell.seed;
        cfg.output = cell.path.string();
        cell.artifact = run_experiment(cfg);
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  // Index file, including pooled pairwise significance between grid entries.
  json cells = json::array();
  std::map<std::size_t, std::vector<double>> pooled;
  for (const SweepCell& c : result.cells) {
    json j = {{"grid_index", c.grid_index},
              {"label", c.label},
              {"seed", c.seed},
              {"path", fs::relative(c.path, out_dir).generic_string()},
              {"rehearsal", rehearsal_json(c.rehearsal)}};
    if (c.artifact) {
      j["status"] = "ok";
      j["config_hash"] = c.artifact->config_hash;
      j["summary"] = summary_json(c.artifact->summary);
      for (const auto& e : c.artifact->episodes)
        pooled[c.grid_index].push_back(static_cast<double>(e.steps_survived));
    } else {
      j["status"] = "failed";
      j["error"] = c.error.value_or("unknown error");
    }
    cells.push_back(std::move(j));
  }
  json pairs = json::array();
  for (auto a = pooled.begin(); a != pooled.end(); ++a)
    for (auto b = std::next(a); b != pooled.end(); ++b) {
      json p = {{"a", a->first}, {"b", b->first}};
      try {
        const WelchResult w = welch_t_test(a->second, b->second);
        p["t"] = w.t;
        p["dof"] = w.dof;
        p["p"] = w.p_two_sided;
        p["mean_a"] = summarize(a->second).mean;
        p["mean_b"] = summarize(b->second).mean;
      } catch (const Error& e) {
        p["error"] = e.what();
      }
      pairs.push_back(std::move(p));
    }
  const json index = {{"format", "acpr-sweep 1"},
                      {"base_config", config_json(base)},
                      {"seeds", seeds},
                      {"cells", std::move(cells)},
                      {"pairwise", std::move(pairs)},
                      {"failed", result.failed()}};
  write_text_file(out_dir / "sweep_index.json", index.dump(2) + "\n");
  return result;
}

}  // namespace acpr
