#include "certipomdp/bench.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "certipomdp/envs.hpp"
#include "certipomdp/rng.hpp"

namespace certipomdp {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int thread_cap() {
  if (const char* env = std::getenv("CERTIPOMDP_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

SolverConfig cell_config(const BenchCell& cell) {
  SolverConfig cfg;
  cfg.kind = cell.solver;
  cfg.iterations_max = cell.iterations;
  cfg.time_budget_ms = cell.time_budget_ms;
  cfg.uct_c = cell.uct_c;
  return cfg;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string run_git_describe() {
  std::string out = "unknown";
  if (FILE* p = popen("git describe --always --dirty 2>/dev/null", "r")) {
    char buf[128];
    if (std::fgets(buf, sizeof(buf), p)) {
      out = trim(buf);
      if (!out.empty()) {
        if (out.back() == '\n') out.pop_back();
      } else {
        out = "unknown";
      }
    }
    pclose(p);
  }
  return out;
}

}  // namespace

EpisodeResult run_episode(const TabularPomdp& m, const BenchCell& cell, int episode_index) {
  EpisodeResult ep;
  ep.env = cell.env;
  ep.solver = solver_kind_name(cell.solver);
  ep.horizon = m.horizon_T + 1;
  ep.episode = episode_index;
  ep.seed = splitmix64(cell.seed0 + static_cast<std::uint64_t>(episode_index));
  // environment draws and planning streams are decoupled so that solver
  // comparisons under the same seed share the world randomness
  Rng env_rng = Rng(ep.seed).fork(0xE17);
  try {
    Belief b = Belief::from_prior(m);
    StateId x = sample_belief(b, env_rng);
    double gamma = 1.0;
    for (int t = 0; t <= m.horizon_T; ++t) {
      SolverConfig cfg = cell_config(cell);
      cfg.seed = splitmix64(ep.seed ^ (0x9e3779b97f4a7c15ull * (t + 1)));
      auto t0 = std::chrono::steady_clock::now();
      PlanResult pr = plan(m, b, cfg);
      ep.step_wall_ms.push_back(
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
              .count());
      ActionId a = pr.chosen_action;
      if (pr.certified_optimal) ep.certified_count++;
      ep.total_reward += gamma * m.rew(x, a);
      gamma *= m.discount;
      ep.steps++;
      if (t < m.horizon_T) {
        StateId xp = sample_next_state(m, env_rng, x, a);
        ObsId z = sample_obs(m, env_rng, xp);
        b = belief_update(m, b, a, z).first;
        x = xp;
      }
    }
  } catch (const std::exception& e) {
    ep.status = std::string("error: ") + e.what();
  }
  return ep;
}

std::vector<BenchCell> parse_suite(std::istream& in) {
  std::vector<BenchCell> cells;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParamError("suite line " + std::to_string(lineno) + ": malformed section header");
      cells.emplace_back();
      cells.back().name = trim(line.substr(1, line.size() - 2));
      continue;
    }
    if (cells.empty()) throw ParamError("suite: key=value before any [cell] section");
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParamError("suite line " + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    BenchCell& c = cells.back();
    try {
      if (key == "env") c.env = value;
      else if (key == "solver") c.solver = solver_kind_from_name(value);
      else if (key == "horizon") c.horizon = std::stoi(value);
      else if (key == "episodes") c.episodes = std::stoi(value);
      else if (key == "iterations" || key == "budget") c.iterations = std::stoll(value);
      else if (key == "time_budget_ms") c.time_budget_ms = std::stoll(value);
      else if (key == "uct_c") c.uct_c = std::stod(value);
      else if (key == "seed0" || key == "seed") c.seed0 = std::stoull(value);
      else throw ParamError("unknown suite key: " + key);
    } catch (const std::invalid_argument&) {
      throw ParamError("suite line " + std::to_string(lineno) + ": bad value for " + key);
    }
  }
  for (const BenchCell& c : cells)
    if (c.env.empty()) throw ParamError("suite cell [" + c.name + "] has no env");
  return cells;
}

std::vector<BenchCell> parse_suite_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParamError("cannot open suite file " + path);
  return parse_suite(f);
}

void write_csv(const std::vector<EpisodeResult>& rows, std::ostream& out) {
  out << "env,solver,horizon,seed,episode,total_reward,steps,certified_count,wall_ms,status\n";
  for (const EpisodeResult& ep : rows) {
    double wall = 0.0;
    for (double w : ep.step_wall_ms) wall += w;
    char wb[32];
    std::snprintf(wb, sizeof(wb), "%.3f", wall);
    out << ep.env << ',' << ep.solver << ',' << ep.horizon << ',' << ep.seed << ','
        << ep.episode << ',' << fmt17(ep.total_reward) << ',' << ep.steps << ','
        << ep.certified_count << ',' << wb << ',' << ep.status << '\n';
  }
}

BenchmarkReport run_benchmark(const std::vector<BenchCell>& cells, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  BenchmarkReport report;
  report.git_describe = run_git_describe();
  {
    std::time_t now = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", std::gmtime(&now));
    report.timestamp = buf;
  }

  std::vector<EpisodeResult> all_rows;
  const int max_threads = thread_cap();
  for (const BenchCell& cell : cells) {
    CellSummary summary;
    summary.cell = cell;
    std::vector<EpisodeResult> rows(cell.episodes);
    try {
      TabularPomdp model = build_env(cell.env, cell.horizon);
      std::atomic<int> next{0};
      auto worker = [&]() {
        for (int i = next.fetch_add(1); i < cell.episodes; i = next.fetch_add(1))
          rows[i] = run_episode(model, cell, i);
      };
      int nthreads = std::min(max_threads, cell.episodes);
      if (nthreads <= 1) {
        worker();
      } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
      }
    } catch (const std::exception& e) {
      rows.assign(1, EpisodeResult{});
      rows[0].env = cell.env;
      rows[0].solver = solver_kind_name(cell.solver);
      rows[0].status = std::string("error: ") + e.what();
    }

    double sum = 0.0, sumsq = 0.0, certsum = 0.0;
    for (const EpisodeResult& ep : rows) {
      if (ep.status == "ok") {
        summary.completed++;
        sum += ep.total_reward;
        sumsq += ep.total_reward * ep.total_reward;
        certsum += ep.certified_count;
      } else {
        summary.failed++;
        report.any_failed = true;
      }
    }
    if (summary.completed > 0) {
      summary.mean = sum / summary.completed;
      summary.mean_certified = certsum / summary.completed;
      if (summary.completed >= 2) {
        double var =
            (sumsq - sum * sum / summary.completed) / (summary.completed - 1);
        summary.stderr_ = std::sqrt(std::max(0.0, var) / summary.completed);
      }
    }
    report.cells.push_back(summary);
    all_rows.insert(all_rows.end(), rows.begin(), rows.end());
  }

  {
    std::ofstream csv(fs::path(out_dir) / "results.csv");
    write_csv(all_rows, csv);
  }
  {
    nlohmann::json j;
    j["git_describe"] = report.git_describe;
    j["timestamp"] = report.timestamp;
    j["cells"] = nlohmann::json::array();
    for (const CellSummary& s : report.cells) {
      nlohmann::json c;
      c["name"] = s.cell.name;
      c["env"] = s.cell.env;
      c["solver"] = solver_kind_name(s.cell.solver);
      c["horizon"] = s.cell.horizon;
      c["episodes"] = s.cell.episodes;
      c["iterations"] = s.cell.iterations;
      c["time_budget_ms"] = s.cell.time_budget_ms;
      c["uct_c"] = s.cell.uct_c;
      c["seed0"] = s.cell.seed0;
      c["completed"] = s.completed;
      c["failed"] = s.failed;
      c["mean"] = s.mean;
      if (s.completed >= 2) c["stderr"] = s.stderr_;
      c["mean_certified"] = s.mean_certified;
      j["cells"].push_back(c);
    }
    std::ofstream js(fs::path(out_dir) / "report.json");
    js << j.dump(2) << '\n';
  }
  return report;
}

std::vector<TimeToCertifiedRow> time_to_certified(
    const std::vector<std::pair<std::string, int>>& instances,
    const std::vector<SolverKind>& solvers, double cap_s, double uct_c, std::uint64_t seed) {
  std::vector<TimeToCertifiedRow> out;
  for (const auto& [env, horizon] : instances) {
    for (SolverKind kind : solvers) {
      TimeToCertifiedRow row;
      row.env = env;
      row.horizon = horizon;
      row.solver = solver_kind_name(kind);
      row.uct_c = uct_c;
      if (cap_s <= 0.0) {
        row.capped = true;
        out.push_back(row);
        continue;
      }
      TabularPomdp model = build_env(env, horizon);
      SolverConfig cfg;
      cfg.kind = kind;
      cfg.iterations_max = 0;  // wall clock is the only cap
      cfg.time_budget_ms = static_cast<std::int64_t>(cap_s * 1000.0);
      cfg.uct_c = uct_c;
      cfg.seed = seed;
      cfg.stop_on_certified = true;
      PlanResult pr = plan(model, Belief::from_prior(model), cfg);
      row.iterations = pr.iterations_used;
      if (pr.certified_optimal) {
        row.seconds = pr.wall_ms / 1000.0;
      } else {
        row.capped = true;
        row.seconds = cap_s;
      }
      out.push_back(row);
    }
  }
  return out;
}

}  // namespace certipomdp
