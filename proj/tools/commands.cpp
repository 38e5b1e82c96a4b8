#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sqz/boundary.hpp"
#include "sqz/cavity_model.hpp"
#include "sqz/core.hpp"
#include "sqz/criterion.hpp"
#include "sqz/metrics.hpp"
#include "sqz/qubit_dynamics.hpp"

namespace sqz::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("key '" + key + "': cannot parse '" + text + "' as a number");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

using Meta = std::vector<std::pair<std::string, std::string>>;

void add_integrator_meta(Meta& meta, const IntegratorOptions& opt) {
  if (opt.mode == StepMode::kFixed) {
    meta.emplace_back("integrator", "rk4_fixed");
    meta.emplace_back("fixed_step", format_number(opt.fixed_step));
  } else {
    meta.emplace_back("integrator", "dopri5_adaptive");
    meta.emplace_back("abs_tol", format_number(opt.abs_tol));
    meta.emplace_back("rel_tol", format_number(opt.rel_tol));
  }
}

Meta base_meta(const std::string& command) {
  return {{"artifact", "sqz"}, {"version", kVersion}, {"command", command}};
}

std::string list_to_string(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += format_number(xs[i]);
  }
  return out;
}

std::vector<double> tau_grid_from(const Config& cfg, double def_max, int def_steps) {
  const double tau_max = cfg.get_double("tau_max", def_max);
  const int steps = cfg.get_int("tau_steps", def_steps);
  if (!(tau_max > 0.0) || steps <= 0) throw ConfigError("tau_max must be > 0 and tau_steps > 0");
  return uniform_grid(tau_max, static_cast<std::size_t>(steps));
}

// Rates are only needed (and then required) when time must be converted or
// spontaneous emission mixes into the bath.
struct RateContext {
  bool has_rates = false;
  SystemRates rates{};
};

RateContext rates_from(const Config& cfg, bool required) {
  RateContext ctx;
  const bool have = cfg.has("omega") && cfg.has("kappa");
  if (!have) {
    if (required) throw ConfigError("omega and kappa must both be given for this run");
    return ctx;
  }
  ctx.has_rates = true;
  ctx.rates = {cfg.get_double("omega", 1.0), cfg.get_double("kappa", 1.0),
               cfg.get_double("gamma_atomic", 0.0)};
  validate_rates(ctx.rates);
  return ctx;
}

struct EvolveSeries {
  double n;
  double m;
  InitialState init;
};

}  // namespace

// ---------------------------------------------------------------- Config

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    cfg.set(key, trim(line.substr(eq + 1)));
  }
  return cfg;
}

Config Config::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void Config::merge(const Config& over) {
  for (const auto& [k, v] : over.values_) values_[k] = v;
}

std::string Config::get_string(const std::string& key, const std::string& def) const {
  const auto it = values_.find(key);
  return it == values_.end() ? def : it->second;
}

double Config::get_double(const std::string& key, double def) const {
  const auto it = values_.find(key);
  return it == values_.end() ? def : parse_double(key, it->second);
}

std::optional<double> Config::get_optional(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return parse_double(key, it->second);
}

int Config::get_int(const std::string& key, int def) const {
  const double v = get_double(key, def);
  if (v != std::floor(v)) throw ConfigError("key '" + key + "' must be an integer");
  return static_cast<int>(v);
}

bool Config::get_bool(const std::string& key, bool def) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return def;
  const std::string v = it->second;
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "' must be a boolean");
}

std::vector<double> Config::get_list(const std::string& key, const std::vector<double>& def) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return def;
  const std::string& text = it->second;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError("key '" + key + "': range must be start:stop:count");
    const double a = parse_double(key, parts[0]);
    const double b = parse_double(key, parts[1]);
    const double c = parse_double(key, parts[2]);
    if (c < 1 || c != std::floor(c)) throw ConfigError("key '" + key + "': count must be >= 1");
    const auto count = static_cast<std::size_t>(c);
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i)
      out[i] = count == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
    return out;
  }
  std::vector<double> out;
  for (const auto& p : split(text, ',')) {
    if (!p.empty()) out.push_back(parse_double(key, p));
  }
  if (out.empty()) throw ConfigError("key '" + key + "' is an empty list");
  return out;
}

// ---------------------------------------------------------------- helpers

IntegratorOptions integrator_options(const GlobalOptions& g, double default_rel,
                                     double default_abs) {
  IntegratorOptions opt;
  opt.rel_tol = default_rel;
  opt.abs_tol = default_abs;
  if (g.tol) {
    if (!(*g.tol > 0.0)) throw ConfigError("--tol must be positive");
    opt.rel_tol = *g.tol;
    opt.abs_tol = 0.1 * *g.tol;
  }
  if (g.deterministic) opt.mode = StepMode::kFixed;
  return opt;
}

std::vector<double> default_n_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.05 * i);
  const int log_points = 20;
  for (int i = 1; i <= log_points; ++i)
    grid.push_back(std::pow(10.0, 2.0 * static_cast<double>(i) / log_points));
  return grid;
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (first_error) std::rethrow_exception(first_error);
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const TruncationOverflow*>(&e)) return kExitTruncation;
  if (dynamic_cast<const Unphysical*>(&e) || dynamic_cast<const NegativeParam*>(&e))
    return kExitUnphysical;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const UnsupportedInitialState*>(&e))
    return kExitConfig;
  return kExitFailure;
}

// ---------------------------------------------------------------- evolve

Report cmd_evolve(const Config& cfg, const GlobalOptions& g) {
  const std::string preset = cfg.get_string("preset", "");
  std::vector<EvolveSeries> series;
  std::vector<double> tau = tau_grid_from(cfg, 10.0, 200);

  if (preset == "fig1a" || preset == "fig1b") {
    const InitialState init = preset == "fig1a" ? InitialState::kGG : InitialState::kEE;
    const double n = 0.7;
    for (double m : cfg.get_list("m", {0.79, 0.902, 1.09})) series.push_back({n, m, init});
  } else if (!preset.empty()) {
    throw ConfigError("unknown evolve preset '" + preset + "' (expected fig1a, fig1b)");
  } else {
    const InitialState init = parse_initial_state(cfg.get_string("initial", "gg"));
    const double n = cfg.get_double("n", 0.0);
    for (double m : cfg.get_list("m", {0.0})) series.push_back({n, m, init});
  }

  const double gamma_atomic = cfg.get_double("gamma_atomic", 0.0);
  const bool physical_time = cfg.get_bool("physical_time", false);
  const RateContext ctx = rates_from(cfg, gamma_atomic > 0.0 || physical_time);

  EvolveOptions eopt;
  eopt.integrator = integrator_options(g);

  Report rep;
  rep.command = "evolve";
  rep.metadata = base_meta("evolve");
  if (!preset.empty()) rep.metadata.emplace_back("preset", preset);
  rep.metadata.emplace_back("tau_max", format_number(tau.back()));
  rep.metadata.emplace_back("tau_steps", std::to_string(tau.size() - 1));
  rep.metadata.emplace_back("gamma_atomic", format_number(gamma_atomic));
  if (ctx.has_rates) {
    rep.metadata.emplace_back("omega", format_number(ctx.rates.rabi_omega));
    rep.metadata.emplace_back("kappa", format_number(ctx.rates.cavity_kappa));
    rep.metadata.emplace_back("bad_cavity_ratio", format_number(ctx.rates.bad_cavity_ratio()));
  }
  add_integrator_meta(rep.metadata, eopt.integrator);

  for (const auto& s : series) {
    const BathParams bare = validate_bath(BathParams{s.n, s.m});
    EffectiveBath eff{1.0, bare.n, bare.m};
    if (ctx.has_rates) eff = effective_bath(bare, ctx.rates);
    const Trajectory tr = evolve(s.init, eff.bath(), tau, eopt);

    Table t;
    t.label = "m" + format_number(s.m);
    t.columns = {"tau", "E_NPT", "S_L", "p_ee", "p_eg", "p_ge", "coh"};
    if (physical_time) t.columns.push_back("t");
    t.metadata = {{"n", format_number(s.n)},
                  {"m", format_number(s.m)},
                  {"initial", std::string(to_string(s.init))},
                  {"n_eff", format_number(eff.n_eff)},
                  {"m_eff", format_number(eff.m_eff)}};
    if (ctx.has_rates) t.metadata.emplace_back("gamma_eff", format_number(eff.gamma_eff));
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      const auto& b = tr.bloch[k];
      std::vector<double> row{tr.times[k],        negativity(tr.states[k]),
                              linear_entropy(tr.states[k]), b.p_ee, b.p_eg, b.p_ge, b.coh};
      if (physical_time) row.push_back(tr.times[k] / eff.gamma_eff);
      t.rows.push_back(std::move(row));
    }
    rep.tables.push_back(std::move(t));
  }
  return rep;
}

// ---------------------------------------------------------------- boundary

Report cmd_boundary(const Config& cfg, const GlobalOptions& g) {
  const std::vector<double> grid = cfg.get_list("n_grid", default_n_grid());
  if (grid.empty()) throw ConfigError("n_grid is empty");
  for (double n : grid)
    if (!(n >= 0.0)) throw ConfigError("n_grid values must be nonnegative");

  const double gamma_atomic = cfg.get_double("gamma_atomic", 0.0);
  const RateContext ctx = rates_from(cfg, gamma_atomic > 0.0);

  Table t;
  t.label = "boundary";
  t.columns = {"n", "boundary_numeric", "closed_form_reading_1", "closed_form_reading_2",
               "sqrt_physical_max", "closed_form_squared_alpha"};
  if (ctx.has_rates && gamma_atomic > 0.0) t.columns.push_back("boundary_with_spontaneous_emission");
  t.rows.resize(grid.size());
  parallel_for(grid.size(), g.workers, [&](std::size_t i) {
    const double n = grid[i];
    std::vector<double> row{n,
                            boundary_numeric(n),
                            boundary_closed_form(n, BoundaryReading::kVarianceOverFour),
                            boundary_closed_form(n, BoundaryReading::kInverseVariance),
                            std::sqrt(n * (n + 1.0)),
                            boundary_closed_form(n, BoundaryReading::kSquaredAlpha)};
    if (ctx.has_rates && gamma_atomic > 0.0)
      row.push_back(boundary_with_spontaneous_emission(n, ctx.rates));
    t.rows[i] = std::move(row);
  });

  Report rep;
  rep.command = "boundary";
  rep.metadata = base_meta("boundary");
  rep.metadata.emplace_back("n_grid", list_to_string(grid));
  rep.metadata.emplace_back("closed_form_reading_1", "alpha = (n + 1/2) / 4");
  rep.metadata.emplace_back("closed_form_reading_2", "alpha = 1 / (4 (n + 1/2))");
  rep.metadata.emplace_back("closed_form_squared_alpha",
                            "-alpha + sqrt(alpha^2 + n(n+1)), alpha = 1 / (4 (n + 1/2))");
  rep.metadata.emplace_back("bisection_m_tol", "1e-10");

  double worst_squared = 0.0, worst_1 = 0.0, worst_2 = 0.0;
  for (const auto& row : t.rows) {
    worst_1 = std::max(worst_1, std::abs(row[2] - row[1]));
    worst_2 = std::max(worst_2, std::abs(row[3] - row[1]));
    worst_squared = std::max(worst_squared, std::abs(row[5] - row[1]));
  }
  rep.summary.emplace_back("max_abs_dev_reading_1", format_number(worst_1));
  rep.summary.emplace_back("max_abs_dev_reading_2", format_number(worst_2));
  rep.summary.emplace_back("max_abs_dev_squared_alpha", format_number(worst_squared));
  rep.tables.push_back(std::move(t));
  return rep;
}

// ---------------------------------------------------------------- criterion

Report cmd_criterion(const Config& cfg, const GlobalOptions& g) {
  const std::vector<double> n_grid = cfg.get_list("n_grid", {0.05, 0.1, 0.3, 0.5, 0.7, 1.0, 2.0});
  const int m_steps = cfg.get_int("m_steps", 11);
  if (m_steps < 1) throw ConfigError("m_steps must be >= 1");
  for (double n : n_grid)
    if (!(n >= 0.0)) throw ConfigError("n_grid values must be nonnegative");

  std::vector<InitialAngles> angles;
  if (cfg.has("theta") || cfg.has("phi")) {
    const auto th = cfg.get_list("theta", {std::numbers::pi / 2});
    const auto ph = cfg.get_list("phi", {std::numbers::pi / 2});
    for (double a : th)
      for (double b : ph) angles.push_back({a, b});
  } else {
    for (const auto& name : split(cfg.get_string("angles", "gg,ee"), ',')) {
      if (name == "gg") angles.push_back(InitialAngles::ground());
      else if (name == "ee") angles.push_back(InitialAngles::excited());
      else if (name == "eg") angles.push_back(InitialAngles::excited_ground());
      else throw ConfigError("unknown angle preset '" + name + "' (expected gg, ee, eg)");
    }
  }

  const double gamma_atomic = cfg.get_double("gamma_atomic", 0.0);
  const RateContext ctx = rates_from(cfg, gamma_atomic > 0.0);

  struct Point {
    double n, m;
  };
  std::vector<Point> points;
  for (double n : n_grid) {
    const double m_max = std::sqrt(n * (n + 1.0));
    for (int j = 0; j < m_steps; ++j)
      points.push_back({n, m_steps == 1 ? m_max : m_max * j / (m_steps - 1)});
  }

  Table t;
  t.label = "criterion";
  t.columns = {"N", "M", "theta", "phi", "lhs", "rhs", "generates"};
  std::vector<std::vector<std::vector<double>>> blocks(points.size());
  parallel_for(points.size(), g.workers, [&](std::size_t i) {
    const BathParams bare = validate_bath(BathParams{points[i].n, points[i].m});
    EffectiveBath eff{1.0, bare.n, bare.m};
    if (ctx.has_rates) eff = effective_bath(bare, ctx.rates);
    const DissipatorBlocks d = build_blocks(eff);
    for (const auto& a : angles) {
      const ConditionResult r = entanglement_condition(d, a);
      blocks[i].push_back({bare.n, bare.m, a.theta, a.phi, r.lhs, r.rhs, r.generates ? 1.0 : 0.0});
    }
  });
  for (auto& b : blocks)
    for (auto& row : b) t.rows.push_back(std::move(row));

  Report rep;
  rep.command = "criterion";
  rep.metadata = base_meta("criterion");
  rep.metadata.emplace_back("n_grid", list_to_string(n_grid));
  rep.metadata.emplace_back("m_steps", std::to_string(m_steps));
  rep.metadata.emplace_back("gamma_atomic", format_number(gamma_atomic));
  rep.metadata.emplace_back("gamma_scale", ctx.has_rates ? "gamma_eff" : "1");
  rep.tables.push_back(std::move(t));
  return rep;
}

// ---------------------------------------------------------------- purity

Report cmd_purity(const Config& cfg, const GlobalOptions& g) {
  std::string preset = cfg.get_string("preset", "");
  std::string mode = cfg.get_string("mode", preset == "fig2b" ? "steady" : "trajectory");
  if (!preset.empty() && preset != "fig2a" && preset != "fig2b")
    throw ConfigError("unknown purity preset '" + preset + "' (expected fig2a, fig2b)");
  if (mode != "trajectory" && mode != "steady")
    throw ConfigError("purity mode must be 'trajectory' or 'steady'");

  Report rep;
  rep.command = "purity";
  rep.metadata = base_meta("purity");
  if (!preset.empty()) rep.metadata.emplace_back("preset", preset);
  rep.metadata.emplace_back("mode", mode);

  if (mode == "trajectory") {
    const double n = preset == "fig2a" ? 0.7 : cfg.get_double("n", 0.7);
    const std::vector<double> ms = cfg.get_list(
        "m", preset == "fig2a" ? std::vector<double>{1.09, 1.05, 0.8} : std::vector<double>{});
    if (ms.empty()) throw ConfigError("purity trajectory mode needs m");
    const InitialState init = parse_initial_state(cfg.get_string("initial", "gg"));
    const std::vector<double> tau = tau_grid_from(cfg, 10.0, 200);
    EvolveOptions eopt;
    eopt.integrator = integrator_options(g);
    add_integrator_meta(rep.metadata, eopt.integrator);
    rep.metadata.emplace_back("initial", std::string(to_string(init)));
    for (double m : ms) {
      const BathParams bath = validate_bath(BathParams{n, m});
      const Trajectory tr = evolve(init, bath, tau, eopt);
      Table t;
      t.label = "m" + format_number(m);
      t.columns = {"tau", "S_L", "E_NPT"};
      t.metadata = {{"n", format_number(n)}, {"m", format_number(m)}};
      for (std::size_t k = 0; k < tr.times.size(); ++k)
        t.rows.push_back({tr.times[k], linear_entropy(tr.states[k]), negativity(tr.states[k])});
      rep.tables.push_back(std::move(t));
    }
    return rep;
  }

  const std::vector<double> ns =
      cfg.get_list("n", preset == "fig2b" ? std::vector<double>{0.7, 0.9} : std::vector<double>{0.7});
  const int m_steps = cfg.get_int("m_steps", 101);
  if (m_steps < 2) throw ConfigError("m_steps must be >= 2");
  rep.metadata.emplace_back("m_steps", std::to_string(m_steps));
  for (double n : ns) {
    validate_bath(BathParams{n, 0.0});
    const double m_max = std::sqrt(n * (n + 1.0));
    Table t;
    t.label = "n" + format_number(n);
    t.columns = {"m", "S_L_steady", "E_NPT_steady"};
    t.metadata = {{"n", format_number(n)}};
    t.rows.resize(static_cast<std::size_t>(m_steps));
    parallel_for(t.rows.size(), g.workers, [&](std::size_t j) {
      const double m = m_max * static_cast<double>(j) / (m_steps - 1);
      const TwoQubitState s = embed_density(steady_state({n, m}));
      t.rows[j] = {m, linear_entropy(s), negativity(s)};
    });
    rep.tables.push_back(std::move(t));
  }
  return rep;
}

// ---------------------------------------------------------------- fullmodel

Report cmd_fullmodel(const Config& cfg, const GlobalOptions& g) {
  const double n = cfg.get_double("n", 0.3);
  const double m = cfg.get_double("m", std::sqrt(n * (n + 1.0)));
  const BathParams bath = validate_bath(BathParams{n, m});
  const double omega = cfg.get_double("omega", 1.0);
  const double ratio = cfg.get_double("kappa_over_omega", 20.0);
  const double kappa = cfg.has("kappa") ? cfg.get_double("kappa", 20.0) : ratio * (omega > 0 ? omega : 1.0);
  const double gamma_atomic = cfg.get_double("gamma_atomic", 0.0);
  const int n_max = cfg.get_int("n_max", 4);
  const InitialState init = parse_initial_state(cfg.get_string("initial", "gg"));
  const std::vector<double> tau = tau_grid_from(cfg, 5.0, 50);
  if (!(omega >= 0.0) || !(kappa > 0.0) || !(gamma_atomic >= 0.0))
    throw NegativeParam("fullmodel needs omega >= 0, kappa > 0, gamma_atomic >= 0");

  const SystemRates rates{omega, kappa, gamma_atomic};
  // Reduced-model rates; with no coupling the time axis falls back to kappa t.
  EffectiveBath eff{0.0, bath.n, bath.m};
  double time_unit = 0.0;  // tau = time_unit * t
  if (omega > 0.0) {
    eff = effective_bath(bath, rates);
    time_unit = eff.gamma_eff;
  } else {
    time_unit = kappa;
  }

  std::vector<double> t_grid(tau.size());
  for (std::size_t k = 0; k < tau.size(); ++k) t_grid[k] = tau[k] / time_unit;

  const CavityModel model(n_max);
  const TwoQubitState atoms0 = embed_density(initial_bloch(init));
  FullEvolveOptions fopt;
  fopt.integrator = integrator_options(g, 1e-8, 1e-8);
  if (fopt.integrator.mode == StepMode::kFixed) {
    // Keep RK4 inside its stability region for the fastest cavity decay.
    const double radius = 2.0 * kappa * (2.0 * n + 1.0 + 2.0 * m) * n_max +
                          2.0 * omega * std::sqrt(double(n_max)) + gamma_atomic;
    fopt.integrator.fixed_step = 1.0 / radius;
  }
  const FullTrajectory full = model.evolve_full(model.with_cavity_vacuum(atoms0.rho), rates, bath,
                                                t_grid, fopt);

  std::vector<TwoQubitState> reduced;
  if (omega > 0.0) {
    EvolveOptions eopt;
    eopt.integrator = integrator_options(g);
    reduced = evolve(init, eff.bath(), tau, eopt).states;
  } else {
    reduced.assign(tau.size(), atoms0);
  }

  Table t;
  t.label = "fullmodel";
  t.columns = {"tau", "trace_distance", "E_NPT_full", "E_NPT_reduced", "top_level_population"};
  double worst = 0.0;
  for (std::size_t k = 0; k < tau.size(); ++k) {
    const Matrix4c atoms = model.reduce_to_atoms(full.states[k]);
    const double td = trace_distance(atoms, reduced[k].rho);
    worst = std::max(worst, td);
    t.rows.push_back({tau[k], td, negativity(atoms), negativity(reduced[k]),
                      model.top_level_population(full.states[k])});
  }

  Report rep;
  rep.command = "fullmodel";
  rep.metadata = base_meta("fullmodel");
  rep.metadata.emplace_back("n", format_number(n));
  rep.metadata.emplace_back("m", format_number(m));
  rep.metadata.emplace_back("omega", format_number(omega));
  rep.metadata.emplace_back("kappa", format_number(kappa));
  rep.metadata.emplace_back("gamma_atomic", format_number(gamma_atomic));
  rep.metadata.emplace_back("n_max", std::to_string(n_max));
  rep.metadata.emplace_back("initial", std::string(to_string(init)));
  rep.metadata.emplace_back("time_axis", omega > 0.0 ? "tau = gamma_eff t" : "tau = kappa t");
  rep.metadata.emplace_back("leakage_estimate",
                            format_number(TruncationBudget::for_bath(n_max, bath).leakage_estimate));
  add_integrator_meta(rep.metadata, fopt.integrator);
  rep.summary.emplace_back("max_trace_distance", format_number(worst));
  rep.summary.emplace_back("max_top_level_population", format_number(full.max_top_level_population));
  rep.summary.emplace_back("max_truncation_leakage", format_number(full.max_truncation_leakage));
  rep.tables.push_back(std::move(t));
  return rep;
}

// ---------------------------------------------------------------- sweep

Report cmd_sweep(const Config& cfg, const GlobalOptions& g) {
  const std::vector<double> n_grid = cfg.get_list("n_grid", {0.1, 0.3, 0.5, 0.7, 0.9, 1.0, 2.0});
  const int m_steps = cfg.get_int("m_steps", 21);
  if (m_steps < 2) throw ConfigError("m_steps must be >= 2");
  for (double n : n_grid)
    if (!(n >= 0.0)) throw ConfigError("n_grid values must be nonnegative");

  struct Point {
    double n, m;
  };
  std::vector<Point> points;
  for (double n : n_grid)
    for (int j = 0; j < m_steps; ++j)
      points.push_back({n, std::sqrt(n * (n + 1.0)) * j / (m_steps - 1)});

  Table t;
  t.label = "sweep";
  t.columns = {"n", "m", "E_NPT_steady", "S_L_steady", "generates_from_gg", "steady_entangled"};
  t.rows.resize(points.size());
  parallel_for(points.size(), g.workers, [&](std::size_t i) {
    const BathParams bath{points[i].n, points[i].m};
    const TwoQubitState s = embed_density(steady_state(bath));
    const double e = negativity(s);
    t.rows[i] = {bath.n, bath.m, e, linear_entropy(s), gg_condition(bath) ? 1.0 : 0.0,
                 e > 1e-12 ? 1.0 : 0.0};
  });

  Report rep;
  rep.command = "sweep";
  rep.metadata = base_meta("sweep");
  rep.metadata.emplace_back("n_grid", list_to_string(n_grid));
  rep.metadata.emplace_back("m_steps", std::to_string(m_steps));
  rep.tables.push_back(std::move(t));
  return rep;
}

// ---------------------------------------------------------------- writers

void write_csv(const Report& report, const Table& table, std::ostream& os) {
  for (const auto& [k, v] : report.metadata) os << "# " << k << ": " << v << '\n';
  for (const auto& [k, v] : table.metadata) os << "# " << k << ": " << v << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    os << (i ? "," : "") << table.columns[i];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
  for (const auto& [k, v] : report.summary) os << "# " << k << ": " << v << '\n';
}

void write_json(const Report& report, std::ostream& os) {
  nlohmann::ordered_json doc;
  doc["command"] = report.command;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.metadata) meta[k] = v;
  doc["metadata"] = meta;
  nlohmann::ordered_json tables = nlohmann::ordered_json::array();
  for (const auto& t : report.tables) {
    nlohmann::ordered_json jt;
    jt["label"] = t.label;
    nlohmann::ordered_json tm = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.metadata) tm[k] = v;
    jt["metadata"] = tm;
    jt["columns"] = t.columns;
    jt["rows"] = t.rows;
    tables.push_back(std::move(jt));
  }
  doc["tables"] = tables;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.summary) summary[k] = v;
  doc["summary"] = summary;
  os << doc.dump(2) << '\n';
}

void emit(const Report& report, const std::optional<std::string>& out_path, bool json,
          std::ostream& stdout_stream) {
  const auto open = [](const std::filesystem::path& p) {
    std::ofstream f(p);
    if (!f) throw ConfigError("cannot write output file '" + p.string() + "'");
    return f;
  };
  if (json) {
    if (out_path) {
      auto f = open(*out_path);
      write_json(report, f);
    } else {
      write_json(report, stdout_stream);
    }
    return;
  }
  if (!out_path) {
    for (std::size_t i = 0; i < report.tables.size(); ++i) {
      if (i) stdout_stream << '\n';
      write_csv(report, report.tables[i], stdout_stream);
    }
    return;
  }
  const std::filesystem::path base(*out_path);
  if (report.tables.size() == 1) {
    auto f = open(base);
    write_csv(report, report.tables.front(), f);
    return;
  }
  for (const auto& t : report.tables) {
    std::filesystem::path p = base;
    p.replace_filename(base.stem().string() + "_" + t.label + base.extension().string());
    auto f = open(p);
    write_csv(report, t, f);
  }
}

}  // namespace sqz::cli
