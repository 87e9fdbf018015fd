// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Library-level criteria call the C++ core directly; the
// protocol criteria drive the acpr-bench executable and the C API.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../vendor/json.hpp"
#include "acpr/acpr.h"
#include "acpr/agent.hpp"
#include "acpr/dynamics.hpp"
#include "acpr/metrics.hpp"
#include "acpr/net.hpp"
#include "acpr/observe.hpp"
#include "retention.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace acpr;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> check;
};

char buf[512];

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "acpr_acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string shell_quote(const std::string& s) { return "'" + s + "'"; }

// Runs the CLI; returns its exit code and captures stdout.
int cli(const std::string& args, std::string* out = nullptr) {
  const std::string cmd = shell_quote(ACPR_CLI_PATH) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return -1;
  std::string text;
  char chunk[4096];
  std::size_t n;
  while ((n = std::fread(chunk, 1, sizeof chunk, p)) > 0) text.append(chunk, n);
  const int status = pclose(p);
  if (out) *out = text;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string drop_last_column(const std::string& csv) {
  std::string out;
  for (const auto& line : lines_of(csv)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

std::vector<std::uint64_t> artifact_steps(const acpr_artifact* a) {
  std::vector<std::uint64_t> s(acpr_artifact_episode_count(a));
  acpr_artifact_steps(a, s.data(), s.size());
  return s;
}

// ---------------------------------------------------------------------------

Outcome encoding_exactness() {
  const auto lin = encode_component(10.0, ParameterKind::linear);
  const auto ang = encode_component(-std::numbers::pi / 6, ParameterKind::angular);
  if (lin != std::make_pair(0.5, 0.0)) return {false, fmt("(+10, linear) -> (%.17g, %.17g)", lin.first, lin.second)};
  if (ang != std::make_pair(0.0, 0.5)) return {false, fmt("(-30deg, angular) -> (%.17g, %.17g)", ang.first, ang.second)};
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 100000; ++i) {
    const auto [p, n] = encode_component(u(rng), i % 2 ? ParameterKind::angular : ParameterKind::linear);
    if (p * n != 0.0 || p < 0 || n < 0) return {false, fmt("sign exclusivity broken at draw %d", i)};
  }
  return {true, "exact examples, 100000 random draws sign-exclusive"};
}

Outcome physics_fidelity() {
  const PhysicsConfig cfg;
  const StateDerivative z = derivatives(CartPoleState{}, 0.0, cfg);
  if (z.x_ddot != 0.0 || z.theta_ddot[0] != 0.0 || z.theta_ddot[1] != 0.0 || z.x_dot != 0.0)
    return {false, "equilibrium derivatives not exactly zero"};
  const CartPoleState rest = integrate(CartPoleState{}, 0.0, 1.0, cfg.integration_substep, cfg);
  if (rest.x != 0.0 || rest.poles[0].theta != 0.0 || rest.poles[1].theta != 0.0)
    return {false, "equilibrium drifted under integration"};

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  double mirror_err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    CartPoleState s, m;
    s.x = u(rng);
    s.x_dot = u(rng);
    for (int k = 0; k < 2; ++k) {
      s.poles[k].theta = u(rng);
      s.poles[k].theta_dot = 4 * u(rng);
    }
    m.x = -s.x;
    m.x_dot = -s.x_dot;
    for (int k = 0; k < 2; ++k) {
      m.poles[k].theta = -s.poles[k].theta;
      m.poles[k].theta_dot = -s.poles[k].theta_dot;
    }
    const double f = 20 * u(rng);
    const auto a = derivatives(s, f, cfg), b = derivatives(m, -f, cfg);
    mirror_err = std::max({mirror_err, std::abs(a.x_ddot + b.x_ddot),
                           std::abs(a.theta_ddot[0] + b.theta_ddot[0]),
                           std::abs(a.theta_ddot[1] + b.theta_ddot[1])});
  }
  if (mirror_err > 1e-14) return {false, fmt("mirror asymmetry %.3g", mirror_err)};

  double worst = 0.0;
  for (const double th : {0.0, 0.03}) {
    CartPoleState a, b;
    a.poles[0].theta = b.poles[0].theta = th;
    a.poles[1].theta = b.poles[1].theta = -2 * th / 3;
    const int steps = static_cast<int>(std::lround(1.0 / cfg.control_interval));
    for (int k = 0; k < steps; ++k) {
      const double f = k % 2 ? -cfg.force_magnitude : cfg.force_magnitude;
      a = integrate(a, f, cfg.control_interval, cfg.integration_substep, cfg);
      b = integrate(b, f, cfg.control_interval, cfg.integration_substep / 10, cfg);
    }
    const double va[] = {a.x, a.x_dot, a.poles[0].theta, a.poles[0].theta_dot, a.poles[1].theta, a.poles[1].theta_dot};
    const double vb[] = {b.x, b.x_dot, b.poles[0].theta, b.poles[0].theta_dot, b.poles[1].theta, b.poles[1].theta_dot};
    for (int i = 0; i < 6; ++i)
      worst = std::max(worst, std::abs(va[i] - vb[i]) / std::max(std::abs(vb[i]), 1e-12));
  }
  return {worst < 1e-6, fmt("fixed point exact, mirror err %.1e, RK4 vs 10x finer over 1 s: %.2e rel", mirror_err, worst)};
}

Outcome gradient_correctness() {
  constexpr double h = 1e-5;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Network n = Network::initialize({4, 5, 2}, seed);
    Rng rng(derive_seed(seed, 99));
    TrainExample ex;
    for (int i = 0; i < 4; ++i) ex.input.push_back(uniform(rng, -1, 1));
    ex.target = {uniform(rng, -1, 1), uniform(rng, -1, 1)};
    ex.weight = uniform(rng, 0.5, 1.5);
    auto loss = [&] {
      const auto y = predict(n, ex.input);
      return 0.5 * ex.weight * ((y[0] - ex.target[0]) * (y[0] - ex.target[0]) + (y[1] - ex.target[1]) * (y[1] - ex.target[1]));
    };
    const Gradients g = backprop_grads(n, ex);
    for (std::size_t l = 0; l < n.layers().size(); ++l) {
      auto sweep_params = [&](std::vector<double>& p, const std::vector<double>& gp) {
        for (std::size_t i = 0; i < p.size(); ++i) {
          const double keep = p[i];
          p[i] = keep + h;
          const double up = loss();
          p[i] = keep - h;
          const double down = loss();
          p[i] = keep;
          const double fd = (up - down) / (2 * h);
          const double err = std::abs(gp[i] - fd) / std::max(1e-4 * std::abs(fd), 1e-7);
          worst = std::max(worst, err);
        }
      };
      sweep_params(n.layers()[l].weights, g.layers[l].weights);
      sweep_params(n.layers()[l].biases, g.layers[l].biases);
    }
  }
  return {worst <= 1.0, fmt("20 networks, worst error %.3f of tolerance", worst)};
}

Outcome td_policy_semantics() {
  Network unit = Network::zeros({1, 1});
  unit.layers()[0].weights[0] = 1.0;
  const bool arithmetic =
      td_error(Network::zeros({1, 1}), {{0.0}, Action::push_left, -1.0, std::nullopt}, 0.95) == -1.0 &&
      td_error(unit, {{0.0}, Action::push_left, 0.0, std::vector<double>{1.0}}, 0.9) == 0.9 &&
      td_error(unit, {{0.9}, Action::push_left, 0.0, std::vector<double>{1.0}}, 0.9) == 0.0;
  if (!arithmetic) return {false, "delta arithmetic mismatch"};

  AgentConfig cfg;
  PlainUpdate rule;
  int good = 0;
  Rng rng(7);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    std::vector<double> obs(18);
    for (auto& v : obs) v = uniform01(rng);
    const Action a = seed % 2 ? Action::push_right : Action::push_left;
    const int ai = static_cast<int>(a);

    Network actor = Network::initialize({18, 16, 2}, seed);
    Network critic = Network::zeros({18, 16, 1});
    critic.layers()[1].biases[0] = -1.0 / (1.0 - cfg.gamma);
    double before = policy_probs(actor, obs, 1.0)[ai];
    const double up = learn_step(actor, critic, {obs, a, 0.0, obs}, cfg, rule);
    const bool rose = up > 0 && policy_probs(actor, obs, 1.0)[ai] > before;

    actor = Network::initialize({18, 16, 2}, seed);
    critic = Network::zeros({18, 16, 1});
    before = policy_probs(actor, obs, 1.0)[ai];
    const double down = learn_step(actor, critic, {obs, a, -1.0, std::nullopt}, cfg, rule);
    const bool fell = down < 0 && policy_probs(actor, obs, 1.0)[ai] < before;
    good += rose && fell;
  }
  return {good == 100, fmt("delta cases exact; signed update held in %d/100 cases", good)};
}

Outcome rehearsal_retention() {
  int wins = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = acpr::testing::run_retention(seed, Strategy::batch);
    wins += r.drift_rehearsed < r.drift_none;
    detail += fmt(" %.3f/%.3f", r.drift_rehearsed, r.drift_none);
  }
  return {wins >= 4, fmt("batch beat none on %d/5 seeds (drift batch/none:", wins) + detail + ")"};
}

Outcome statistics_oracle() {
  const std::vector<double> three{1, 2, 3};
  const SummaryStats s = summarize(three);
  if (s.mean != 2.0 || s.median != 2.0 || std::abs(s.rmsd - std::sqrt(2.0 / 3.0)) > 1e-15)
    return {false, "summarize([1,2,3]) mismatch"};
  const std::vector<double> a{4, 8, 15, 16, 23, 42};
  const WelchResult same = welch_t_test(a, a);
  if (same.t != 0.0 || same.p_two_sided != 1.0) return {false, "identical samples not (0, 1)"};
  const std::vector<double> x{1, 2, 3, 4, 5}, y{2, 3, 4, 5, 6};
  const WelchResult w = welch_t_test(x, y);
  // scipy.stats.ttest_ind(x, y, equal_var=False)
  const bool ok = std::abs(w.t + 1.0) < 1e-9 && std::abs(w.dof - 8.0) < 1e-9 &&
                  std::abs(w.p_two_sided - 0.34659350708733416) < 1e-3;
  return {ok, fmt("Welch t=%.6f dof=%.6f p=%.8f", w.t, w.dof, w.p_two_sided)};
}

Outcome protocol_reproduction() {
  const fs::path a = work_dir() / "c7_a", b = work_dir() / "c7_b";
  const auto t0 = std::chrono::steady_clock::now();
  if (cli("run --seed 1 --episodes 1000 --out " + shell_quote(a.string())) != 0)
    return {false, "run A failed"};
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (cli("run --seed 2 --episodes 1000 --out " + shell_quote(b.string())) != 0)
    return {false, "run B failed"};

  const auto rows = lines_of(slurp(a / "results.csv"));
  if (rows.size() != 1001 || rows[0] != "episode,steps,terminal_cause,compute_ns")
    return {false, fmt("results.csv has %zu lines", rows.size())};
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto last = rows[i].rfind(',');
    if (std::stoll(rows[i].substr(last + 1)) <= 0) return {false, fmt("row %zu lacks compute time", i)};
  }

  std::string out;
  if (cli("compare --json --ma-window 10 " + shell_quote(a.string()) + " " + shell_quote(b.string()), &out) != 0)
    return {false, "compare failed: " + out};
  const json r = json::parse(out);
  const bool shape = r.at("difference").size() == 1000 && r.at("moving_average_a").size() == 991 &&
                     r.at("moving_average_b").size() == 991 && r.at("summary_a").contains("median") &&
                     r.at("summary_b").contains("rmsd") && r.at("welch").at("p").is_number();
  if (!shape) return {false, "comparison report incomplete"};
  return {secs < 300.0, fmt("1000-episode run in %.2f s; report p = %.4g", secs, r["welch"]["p"].get<double>())};
}

Outcome baseline_learning() {
  acpr_config* cfg = nullptr;
  acpr_config_default(&cfg);
  int wins = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    acpr_config_set_seed(cfg, seed);
    acpr_artifact* art = nullptr;
    if (acpr_run(cfg, &art) != ACPR_OK) {
      detail += fmt(" seed %llu error", static_cast<unsigned long long>(seed));
      continue;
    }
    const auto s = artifact_steps(art);
    double first = 0, last = 0;
    for (std::size_t i = 0; i < 100; ++i) {
      first += static_cast<double>(s[i]);
      last += static_cast<double>(s[s.size() - 100 + i]);
    }
    wins += last > 1.5 * first;
    detail += fmt(" %.1f->%.1f", first / 100, last / 100);
    acpr_artifact_free(art);
  }
  acpr_config_free(cfg);
  return {wins >= 3, fmt("%d/5 seeds improved >1.5x (first100->last100 means:", wins) + detail + ")"};
}

Outcome determinism() {
  const fs::path a = work_dir() / "c9_a", b = work_dir() / "c9_b";
  const std::string args = "run --seed 11 --episodes 300 --strategy batch --out ";
  if (cli(args + shell_quote(a.string())) != 0 || cli(args + shell_quote(b.string())) != 0)
    return {false, "run failed"};
  const std::string ca = slurp(a / "results.csv"), cb = slurp(b / "results.csv");
  if (ca.empty() || drop_last_column(ca) != drop_last_column(cb))
    return {false, "CSVs differ outside compute_ns"};

  const fs::path grid = work_dir() / "c9_grid.json";
  std::ofstream(grid) << R"([{"strategy": "none"}, {"strategy": "ortho", "pseudo_count": 4}])";
  acpr_config* cfg = nullptr;
  acpr_config_default(&cfg);
  acpr_config_set_episodes(cfg, 200);
  const std::uint64_t seeds[] = {1, 2, 3};
  acpr_sweep_result* sw = nullptr;
  if (acpr_sweep(cfg, grid.c_str(), seeds, 3, (work_dir() / "c9_sweep").c_str(), 4, &sw) != ACPR_OK) {
    acpr_config_free(cfg);
    return {false, std::string("sweep failed: ") + acpr_last_error()};
  }
  bool same = acpr_sweep_cell_count(sw) == 6 && acpr_sweep_failed_count(sw) == 0;
  for (std::size_t i = 0; same && i < 6; ++i) {
    acpr_config* alone = nullptr;
    acpr_config_clone(cfg, &alone);
    acpr_config_set_seed(alone, acpr_sweep_cell_seed(sw, i));
    if (i >= 3) {
      acpr_config_set_strategy(alone, "ortho");
      acpr_config_set_pseudo_count(alone, 4);
    }
    acpr_artifact* art = nullptr;
    same = acpr_run(alone, &art) == ACPR_OK &&
           artifact_steps(art) == artifact_steps(acpr_sweep_cell_artifact(sw, i));
    acpr_artifact_free(art);
    acpr_config_free(alone);
  }
  acpr_sweep_free(sw);
  acpr_config_free(cfg);
  return {same, same ? "repeat runs identical modulo compute_ns; 6 concurrent sweep cells match solo runs"
                     : "sweep cell differs from solo run"};
}

Outcome hypothesis_harness() {
  const fs::path grid = work_dir() / "c10_grid.json", out = work_dir() / "c10_sweep";
  std::ofstream(grid) << R"({"strategy": ["none", "batch", "ortho"], "pseudo_count": [4, 8], "reinit_every": [5, 20]})";
  std::string log;
  if (cli("sweep --grid " + shell_quote(grid.string()) + " --seeds 1..2 --episodes 100 --out " + shell_quote(out.string()), &log) != 0)
    return {false, "sweep failed: " + log};
  const json index = json::parse(slurp(out / "sweep_index.json"));
  const std::size_t entries = 12;
  const auto& pairs = index.at("pairwise");
  if (index.at("cells").size() != entries * 2 || pairs.size() != entries * (entries - 1) / 2)
    return {false, fmt("index has %zu cells, %zu pairs", index["cells"].size(), pairs.size())};
  int significant = 0;
  for (const auto& p : pairs) {
    const double pv = p.at("p").get<double>();
    if (!(pv >= 0.0 && pv <= 1.0)) return {false, "pairwise p out of range"};
    significant += pv < 0.05;
  }

  std::vector<fs::path> seed1;
  for (const auto& c : index["cells"])
    if (c.at("seed").get<std::uint64_t>() == 1) seed1.push_back(out / c.at("path").get<std::string>());
  int reports = 0;
  for (std::size_t i = 0; i < seed1.size(); ++i) {
    for (std::size_t j = i + 1; j < seed1.size(); ++j) {
      acpr_artifact *a = nullptr, *b = nullptr;
      acpr_report* r = nullptr;
      acpr_welch w{};
      if (acpr_artifact_load(seed1[i].c_str(), &a) == ACPR_OK &&
          acpr_artifact_load(seed1[j].c_str(), &b) == ACPR_OK &&
          acpr_compare(a, b, 10, &r) == ACPR_OK && acpr_report_welch(r, &w) == ACPR_OK &&
          w.p_two_sided >= 0.0 && w.p_two_sided <= 1.0)
        ++reports;
      acpr_report_free(r);
      acpr_artifact_free(a);
      acpr_artifact_free(b);
    }
  }
  std::string cmp;
  const int rc = cli("compare --out " + shell_quote((work_dir() / "c10_cmp").string()) + " " +
                     shell_quote(seed1.front().string()) + " " + shell_quote(seed1.back().string()), &cmp);
  const bool written = rc == 0 && fs::exists(work_dir() / "c10_cmp" / "compare.json") &&
                       cmp.find("Welch") != std::string::npos;
  const int expected = static_cast<int>(entries * (entries - 1) / 2);
  return {reports == expected && written,
          fmt("%zu pooled pairs in index (%d with p < 0.05, not required); %d/%d per-seed compare reports",
              pairs.size(), significant, reports, expected)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "encoding exactness", 1, encoding_exactness},
      {2, "physics fidelity", 5, physics_fidelity},
      {3, "gradient correctness", 5, gradient_correctness},
      {4, "TD/policy semantics", 5, td_policy_semantics},
      {5, "rehearsal retention", 30, rehearsal_retention},
      {6, "statistics oracle", 1, statistics_oracle},
      {7, "protocol reproduction", 300, protocol_reproduction},
      {8, "baseline learning smoke", 1500, baseline_learning},
      {9, "determinism", 600, determinism},
      {10, "hypothesis harness", 600, hypothesis_harness},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) {
      o.pass = false;
      o.detail += fmt(" [over %.0f s budget]", c.budget_s);
    }
    failed += !o.pass;
    std::printf("%s  criterion %2d  %-24s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  fs::remove_all(work_dir());
  return failed == 0 ? 0 : 1;
}
