#include "levyctl/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "levyctl/errors.hpp"
#include "levyctl/fluctuation.hpp"
#include "levyctl/game.hpp"
#include "levyctl/impulse_control.hpp"
#include "levyctl/mc_oracle.hpp"
#include "levyctl/numerics.hpp"
#include "levyctl/run_config.hpp"
#include "levyctl/singular_control.hpp"

namespace levyctl::cli {

namespace {

using nlohmann::json;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Overrides {
  std::string config;
  std::string out;
  std::string value_csv;
  std::string curves_csv;
  std::string mc_csv;
  std::string from_solution;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> paths;
  std::optional<double> dt;
  std::optional<double> tol_fit;
  std::optional<double> tol_vi;
  std::optional<double> lo, hi;
  std::optional<int> n;
  bool mc = false;
  bool serial = false;
  bool timings = false;
};

/// Non-finite numbers travel as null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double num_in(const json& j, const char* key, double null_value) {
  if (!j.contains(key)) throw ValidationError(std::string("solution.") + key + ": missing field");
  const json& v = j.at(key);
  if (v.is_null()) return null_value;
  if (!v.is_number()) throw ValidationError(std::string("solution.") + key + ": expected a number");
  return v.get<double>();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) { row_strings(header); }
  void row(std::initializer_list<double> vals) {
    std::vector<std::string> s;
    for (double v : vals) s.push_back(fmt(v));
    row_strings(s);
  }
  void row_strings(const std::vector<std::string>& s) {
    for (std::size_t i = 0; i < s.size(); ++i) os_ << (i ? "," : "") << s[i];
    os_ << "\n";
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError(path + ": cannot open for writing");
  f << text;
}

RunConfig load(const Overrides& o) {
  RunConfig cfg;
  if (!o.from_solution.empty()) {
    std::ifstream in(o.from_solution);
    if (!in) throw ValidationError(o.from_solution + ": cannot open solution file");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ValidationError(o.from_solution + ": malformed JSON: " + e.what());
    }
    if (!doc.contains("config")) throw ValidationError(o.from_solution + ": missing field 'config'");
    cfg = parse_run_config(doc.at("config"));
  } else {
    if (o.config.empty()) throw ValidationError("--config is required");
    cfg = load_run_config(o.config);
  }
  if (o.seed) cfg.mc.seed = *o.seed;
  if (o.paths) {
    if (*o.paths < 2) throw ValidationError("--paths: must be >= 2");
    cfg.mc.n_paths = *o.paths;
  }
  if (o.dt) {
    if (!(*o.dt > 0.0)) throw ValidationError("--dt: must be > 0");
    cfg.mc.dt = *o.dt;
  }
  if (o.tol_fit) {
    if (!(*o.tol_fit > 0.0)) throw ValidationError("--tol-fit: must be > 0");
    cfg.tol_fit = *o.tol_fit;
  }
  if (o.tol_vi) {
    if (!(*o.tol_vi > 0.0)) throw ValidationError("--tol-vi: must be > 0");
    cfg.tol_vi = *o.tol_vi;
  }
  if (o.lo) cfg.grid.lo = *o.lo;
  if (o.hi) cfg.grid.hi = *o.hi;
  if (o.n) cfg.grid.n = *o.n;
  if (!(cfg.grid.lo < cfg.grid.hi) || cfg.grid.n < 2) throw ValidationError("grid: requires lo < hi and n >= 2");
  if (o.serial) cfg.mc.parallel = false;
  if (o.mc) cfg.verify.mc = true;
  auto pick = [](const std::string& flag, const std::string& conf) { return flag.empty() ? conf : flag; };
  cfg.output.json = pick(o.out, cfg.output.json);
  cfg.output.value_csv = pick(o.value_csv, cfg.output.value_csv);
  cfg.output.curves_csv = pick(o.curves_csv, cfg.output.curves_csv);
  cfg.output.mc_csv = pick(o.mc_csv, cfg.output.mc_csv);
  return cfg;
}

std::vector<double> grid_of(const RunConfig& cfg) { return linspace(cfg.grid.lo, cfg.grid.hi, cfg.grid.n); }

/// Evenly spaced family parameter values on [lo, hi] plus the optimum itself.
std::vector<double> family_values(double lo, double hi, double star) {
  if (!std::isfinite(lo)) lo = star - 1.0;
  if (!std::isfinite(hi)) hi = star + 1.0;
  if (!(hi > lo)) hi = lo + 1.0;
  auto v = linspace(lo, hi, 5);
  if (std::isfinite(star)) v.push_back(star);
  return v;
}

double curve_span(double first, double second, double phi) {
  return std::isfinite(second) ? std::max(1.5 * (second - first), 1.0 / phi) : 10.0 / phi;
}

void curves(const std::string& path, const char* a_name, const char* b_name,
            const std::vector<double>& firsts, double span,
            const std::function<double(double, double)>& L,
            const std::function<double(double, double)>& l) {
  if (path.empty()) return;
  Csv csv({a_name, b_name, "Lambda", "lambda"});
  for (double a : firsts)
    for (double b : linspace(a, a + span, 101)) csv.row({a, b, L(a, b), l(a, b)});
  write_text(path, csv.str());
}

json report_json(const VerificationReport& rep) {
  json items = json::array();
  for (const auto& c : rep.items)
    items.push_back({{"name", c.name}, {"region", c.region}, {"x", num(c.x)},
                     {"value", num(c.value)}, {"tol", num(c.tol)}, {"status", to_string(c.status)}});
  return {{"pass", rep.count(CheckStatus::Pass)},
          {"warn", rep.count(CheckStatus::Warn)},
          {"fail", rep.count(CheckStatus::Fail)},
          {"skip", rep.count(CheckStatus::Skip)},
          {"items", items}};
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }
};

// ---------- solution <-> JSON ----------

json solution_json(const SingularSolution& s) {
  return {{"case", to_string(s.kind)},
          {"a_star", num(s.a_star)},
          {"b_star", num(s.b_star)},
          {"aunder", num(s.aunder)},
          {"abar", num(s.abar)},
          {"residuals", {{"Lambda", num(s.residual_Lambda)}, {"lambda", num(s.residual_lambda)}}}};
}

json solution_json(const ImpulseSolution& s) {
  return {{"s_star", num(s.s_star)},
          {"S_star", num(s.S_star)},
          {"aunder", num(s.aunder)},
          {"abar", num(s.abar)},
          {"residuals", {{"Lambda", num(s.residual_Lambda)}, {"lambda", num(s.residual_lambda)}}}};
}

json solution_json(const GameSolution& s) {
  return {{"case", static_cast<int>(s.kind)},
          {"case_name", to_string(s.kind)},
          {"alpha_star", num(s.alpha_star)},
          {"beta_star", num(s.beta_star)},
          {"alphaunder", num(s.alphaunder)},
          {"alphabar", num(s.alphabar)},
          {"kappa", num(s.kappa)},
          {"psi_alpha", num(s.psi_alpha)},
          {"residuals", {{"Lambda", num(s.residual_Lambda)}, {"lambda", num(s.residual_lambda)}}},
          {"warnings", s.warnings}};
}

json stored_solution(const std::string& path) {
  std::ifstream in(path);
  json doc = json::parse(in);
  if (!doc.contains("solution") || !doc.at("solution").is_object())
    throw ValidationError(path + ": missing field 'solution'");
  return doc.at("solution");
}

SingularCase singular_case(const std::string& s) {
  for (auto c : {SingularCase::Interior, SingularCase::BStarInfinite, SingularCase::DividendDual,
                 SingularCase::DividendSN})
    if (s == to_string(c)) return c;
  throw ValidationError("solution.case: unknown singular case '" + s + "'");
}

SingularSolution restore_singular(const RunConfig& cfg, const json& j) {
  const json& r = j.at("residuals");
  return {singular_problem(cfg), singular_case(j.at("case").get<std::string>()),
          num_in(j, "a_star", -kInf), num_in(j, "b_star", kInf), num_in(j, "aunder", -kInf),
          num_in(j, "abar", kInf), num_in(r, "Lambda", kNaN), num_in(r, "lambda", kNaN)};
}

ImpulseSolution restore_impulse(const RunConfig& cfg, const json& j) {
  const json& r = j.at("residuals");
  return {impulse_problem(cfg), num_in(j, "s_star", kNaN), num_in(j, "S_star", kNaN),
          num_in(j, "aunder", kNaN), num_in(j, "abar", kNaN), num_in(r, "Lambda", kNaN),
          num_in(r, "lambda", kNaN)};
}

GameSolution restore_game(const RunConfig& cfg, const json& j) {
  const json& r = j.at("residuals");
  const int c = j.at("case").get<int>();
  if (c < 1 || c > 4) throw ValidationError("solution.case: expected 1..4");
  return {game_spec(cfg), static_cast<GameCase>(c), num_in(j, "alpha_star", kNaN),
          num_in(j, "beta_star", kInf), num_in(j, "alphaunder", kNaN), num_in(j, "alphabar", kNaN),
          num_in(r, "Lambda", kNaN), num_in(r, "lambda", kNaN), num_in(j, "kappa", kNaN),
          num_in(j, "psi_alpha", kNaN), j.value("warnings", std::vector<std::string>{})};
}

// ---------- value grids and curves ----------

void value_grid(const RunConfig& cfg, const SingularSolution& s) {
  if (cfg.output.value_csv.empty()) return;
  Csv csv({"x", "v", "v_prime"});
  for (double x : grid_of(cfg)) csv.row({x, value(s, x), value_prime(s, x)});
  write_text(cfg.output.value_csv, csv.str());
}

void value_grid(const RunConfig& cfg, const ImpulseSolution& s) {
  if (cfg.output.value_csv.empty()) return;
  Csv csv({"x", "v", "v_tilde", "v_prime"});
  for (double x : grid_of(cfg)) csv.row({x, value(s, x), value_tilde(s, x), value_prime(s, x)});
  write_text(cfg.output.value_csv, csv.str());
}

void value_grid(const RunConfig& cfg, const GameSolution& s) {
  if (cfg.output.value_csv.empty()) return;
  Csv csv({"x", "v", "v_prime", "g_S", "g_I", "contract_value"});
  for (double x : grid_of(cfg)) {
    const auto g = payoffs(s.spec, x);
    csv.row({x, value(s, x), value_prime(s, x), g.g_S, g.g_I, contract_value(s, x)});
  }
  write_text(cfg.output.value_csv, csv.str());
}

void curve_data(const RunConfig& cfg, const SingularSolution& s) {
  const auto& p = s.problem;
  curves(cfg.output.curves_csv, "a", "b", family_values(s.aunder, s.abar, s.a_star),
         curve_span(s.a_star, s.b_star, p.family.phi()),
         [&](double a, double b) { return Lambda(p, a, b); },
         [&](double a, double b) { return lambda_b(p, a, b); });
}

void curve_data(const RunConfig& cfg, const ImpulseSolution& s) {
  const auto& p = s.problem;
  curves(cfg.output.curves_csv, "s", "S", family_values(s.s_star, s.aunder, s.s_star),
         curve_span(s.s_star, s.S_star, p.family.phi()),
         [&](double a, double b) { return Lambda_impulse(p, a, b); },
         [&](double a, double b) { return lambda_impulse(p, a, b); });
}

void curve_data(const RunConfig& cfg, const GameSolution& s) {
  const double lo = s.alphaunder > 0.0 ? s.alphaunder : 0.05 * s.alphabar;
  const double hi = s.alphabar > lo ? s.alphabar : lo + 1.0;
  auto firsts = family_values(lo, hi, s.alpha_star);
  std::erase_if(firsts, [](double a) { return !(a > 0.0); });
  curves(cfg.output.curves_csv, "alpha", "beta", firsts,
         curve_span(s.alpha_star, s.beta_star, s.spec.family.phi()),
         [&](double a, double b) { return Lambda_game(s.spec, a, b); },
         [&](double a, double b) { return lambda_game(s.spec, a, b); });
}

// ---------- Monte-Carlo comparison table ----------

struct McRow {
  std::string quantity;
  double x;
  double analytic;
  McEstimate est;
  double allowance;
  CheckStatus on_fail = CheckStatus::Fail;
};

CheckStatus row_status(const McRow& r) {
  const double tol = 3.0 * r.est.std_error + r.allowance;
  return std::abs(r.est.mean - r.analytic) <= tol ? CheckStatus::Pass : r.on_fail;
}

json mc_table(const RunConfig& cfg, const std::vector<McRow>& rows, VerificationReport& rep) {
  Csv csv({"quantity", "x", "analytic", "mc", "std_error", "allowance", "status"});
  json out = json::array();
  for (const auto& r : rows) {
    const auto st = row_status(r);
    rep.add("mc_" + r.quantity, "policy", r.x, r.est.mean - r.analytic,
            3.0 * r.est.std_error + r.allowance, st);
    csv.row_strings({r.quantity, fmt(r.x), fmt(r.analytic), fmt(r.est.mean), fmt(r.est.std_error),
                     fmt(r.allowance), to_string(st)});
    out.push_back({{"quantity", r.quantity}, {"x", r.x}, {"analytic", num(r.analytic)},
                   {"mc", num(r.est.mean)}, {"std_error", num(r.est.std_error)},
                   {"allowance", num(r.allowance)}, {"n_paths", r.est.n_paths}, {"dt", r.est.dt},
                   {"status", to_string(st)}});
  }
  if (!cfg.output.mc_csv.empty()) write_text(cfg.output.mc_csv, csv.str());
  return out;
}

double or_default(double v, double def) { return std::isfinite(v) ? v : def; }

std::vector<McRow> mc_rows(const RunConfig& cfg, const SingularSolution& s) {
  const auto& p = s.problem;
  const double x = or_default(cfg.verify.x, std::isfinite(s.b_star) ? 0.5 * (s.a_star + s.b_star)
                                                                     : s.a_star + 1.0);
  const double sig = p.family.model().sigma();
  auto est = mc::npv_doubly_reflected(p.family.model(), p.family.q(), s.a_star, s.b_star, p.f,
                                      p.C_U, p.C_D, x, cfg.mc);
  return {{"singular_value", x, value(s, x), est,
           mc::dt_allowance(cfg.mc.dt, sig * (std::abs(p.C_U) + std::abs(p.C_D)))}};
}

std::vector<McRow> mc_rows(const RunConfig& cfg, const ImpulseSolution& s) {
  const auto& p = s.problem;
  const double x = or_default(cfg.verify.x, 0.5 * (s.s_star + s.S_star));
  const double sig = p.family.model().sigma();
  auto r = mc::npv_sS(p.family.model(), p.family.q(), s.s_star, s.S_star, p.f, p.C_U, p.K, x, cfg.mc);
  return {{"impulse_value", x, value(s, x), r.npv,
           mc::dt_allowance(cfg.mc.dt, sig * std::abs(value_prime(s, s.s_star)))}};
}

std::vector<McRow> mc_rows(const RunConfig& cfg, const GameSolution& s) {
  const double x = or_default(cfg.verify.x, std::isfinite(s.beta_star)
                                                ? 0.5 * (s.alpha_star + s.beta_star)
                                                : s.alpha_star + 1.0);
  const double sig = s.spec.family.model().sigma();
  double slope = std::abs(value_prime(s, std::max(s.alpha_star, 1e-9) + 1e-9));
  if (std::isfinite(s.beta_star)) slope += std::abs(value_prime(s, s.beta_star - 1e-9));
  const double allow = mc::dt_allowance(cfg.mc.dt, sig * slope);
  const auto on_fail = s.kind == GameCase::Interior ? CheckStatus::Fail : CheckStatus::Warn;
  auto tr = mc::game_payoff(s.spec, s.alpha_star, s.beta_star, x, cfg.mc, mc::GamePayoffForm::Transformed);
  auto ct = mc::game_payoff(s.spec, s.alpha_star, s.beta_star, x, cfg.mc, mc::GamePayoffForm::Contract);
  return {{"game_value", x, value(s, x), tr, allow, on_fail},
          {"game_contract_value", x, contract_value(s, x), ct, allow, on_fail}};
}

std::vector<McRow> mc_rows_model(const RunConfig& cfg) {
  const auto fam = build_family(cfg);
  const auto& m = fam.model();
  const double b = cfg.grid.hi > 0.0 ? cfg.grid.hi : 2.0;
  const double x = or_default(cfg.verify.x, 0.5 * b);
  const double q = fam.q();
  // Discrete monitoring moves both barriers outwards by O(sigma sqrt(dt)); a
  // shift of the lower barrier equals a joint shift of x and b.
  const double h = 1e-4 * std::max(1.0, b);
  auto sens = [&](auto f) {
    const double db = (f(x, b + h) - f(x, b - h)) / (2.0 * h);
    const double dxb = (f(x + h, b + h) - f(x - h, b - h)) / (2.0 * h);
    return std::abs(db) + std::abs(dxb);
  };
  const double s_up = sens([&](double y, double bb) { return exit_up(fam, y, bb); });
  const double s_dn = sens([&](double y, double bb) { return exit_down(fam, y, bb); });
  const double s_ru = std::abs(ruin_laplace(fam, x + h) - ruin_laplace(fam, x - h)) / (2.0 * h);
  const auto pair = mc::exit_two_sided(m, q, x, b, cfg.mc);
  const auto ru = mc::ruin_laplace(m, q, x, cfg.mc);
  const double sig = m.sigma();
  return {{"exit_up", x, exit_up(fam, x, b), pair.up, mc::dt_allowance(cfg.mc.dt, sig * s_up)},
          {"exit_down", x, exit_down(fam, x, b), pair.down, mc::dt_allowance(cfg.mc.dt, sig * s_dn)},
          {"ruin_laplace", x, ruin_laplace(fam, x), ru, mc::dt_allowance(cfg.mc.dt, sig * s_ru)}};
}

// ---------- subcommands ----------

int scale_table(const Overrides& o) {
  const RunConfig cfg = load(o);
  const ScaleFamily fam = build_family(cfg);
  Csv csv({"x", "W", "W_prime", "Z", "Wbar", "Zbar", "Theta"});
  for (double x : grid_of(cfg))
    csv.row({x, fam.W(x), fam.W_prime(x), fam.Z(x), fam.Wbar(x), fam.Zbar(x), x >= 0.0 ? fam.Theta(x) : kNaN});
  write_text(o.out.empty() ? cfg.output.value_csv : o.out, csv.str());
  return Ok;
}

template <class Sol>
int finish_solve(const RunConfig& cfg, const Overrides& o, const Sol& sol, double solve_ms) {
  value_grid(cfg, sol);
  curve_data(cfg, sol);
  json out{{"config", to_json(cfg)}, {"solution", solution_json(sol)}};
  if (o.timings) out["timings"] = {{"solve_ms", solve_ms}};
  write_text(cfg.output.json, out.dump(2) + "\n");
  return Ok;
}

int solve_singular(const Overrides& o) {
  const RunConfig cfg = load(o);
  Timer t;
  const auto sol = o.from_solution.empty()
                       ? solve(singular_problem(cfg), SingularOptions{cfg.tol_fit, cfg.tol_vi})
                       : restore_singular(cfg, stored_solution(o.from_solution));
  return finish_solve(cfg, o, sol, t.ms());
}

int solve_impulse(const Overrides& o) {
  const RunConfig cfg = load(o);
  Timer t;
  const auto sol = o.from_solution.empty()
                       ? solve(impulse_problem(cfg), ImpulseOptions{cfg.tol_fit, cfg.tol_vi})
                       : restore_impulse(cfg, stored_solution(o.from_solution));
  return finish_solve(cfg, o, sol, t.ms());
}

int solve_game(const Overrides& o) {
  const RunConfig cfg = load(o);
  Timer t;
  const auto sol = o.from_solution.empty()
                       ? solve(game_spec(cfg), GameOptions{cfg.tol_fit, cfg.tol_vi})
                       : restore_game(cfg, stored_solution(o.from_solution));
  return finish_solve(cfg, o, sol, t.ms());
}

void print_table(const VerificationReport& rep) {
  for (const auto& c : rep.items)
    if (c.status != CheckStatus::Pass)
      std::cerr << to_string(c.status) << "  " << c.name << " [" << c.region << "] x=" << c.x
                << " value=" << c.value << " tol=" << c.tol << "\n";
  std::cerr << "checks: " << rep.count(CheckStatus::Pass) << " pass, "
            << rep.count(CheckStatus::Warn) << " warn, " << rep.count(CheckStatus::Fail)
            << " fail, " << rep.count(CheckStatus::Skip) << " skip\n";
}

int verify(const Overrides& o) {
  const RunConfig cfg = load(o);
  Timer t;
  const auto grid = grid_of(cfg);
  const ScaleFamily fam = build_family(cfg);
  VerificationReport rep = martingale_check(fam, grid.front() - 0.5, grid, 1e-6);
  json out{{"config", to_json(cfg)}};
  std::vector<McRow> rows;
  if (std::holds_alternative<SingularConfig>(cfg.problem)) {
    const auto sol = solve(singular_problem(cfg), SingularOptions{cfg.tol_fit, cfg.tol_vi});
    out["solution"] = solution_json(sol);
    rep.merge(vi_check(sol, grid, SingularOptions{cfg.tol_fit, cfg.tol_vi}));
    if (cfg.verify.mc) rows = mc_rows(cfg, sol);
  } else if (std::holds_alternative<ImpulseConfig>(cfg.problem)) {
    const auto sol = solve(impulse_problem(cfg), ImpulseOptions{cfg.tol_fit, cfg.tol_vi});
    out["solution"] = solution_json(sol);
    rep.merge(qvi_check(sol, grid, ImpulseOptions{cfg.tol_fit, cfg.tol_vi}));
    if (cfg.verify.mc) rows = mc_rows(cfg, sol);
  } else if (std::holds_alternative<GameConfig>(cfg.problem)) {
    const auto sol = solve(game_spec(cfg), GameOptions{cfg.tol_fit, cfg.tol_vi});
    out["solution"] = solution_json(sol);
    if (sol.kind == GameCase::Interior)
      rep.merge(vi_check(sol, grid, GameOptions{cfg.tol_fit, cfg.tol_vi}));
    else
      rep.add("game_vi", "case " + std::to_string(static_cast<int>(sol.kind)), kNaN, kNaN, kNaN,
              CheckStatus::Skip);
    if (cfg.verify.mc) rows = mc_rows(cfg, sol);
  } else if (cfg.verify.mc) {
    rows = mc_rows_model(cfg);
  }
  if (!rows.empty()) out["mc"] = mc_table(cfg, rows, rep);
  out["checks"] = report_json(rep);
  if (o.timings) out["timings"] = {{"verify_ms", t.ms()}};
  write_text(cfg.output.json, out.dump(2) + "\n");
  print_table(rep);
  return rep.ok() ? Ok : VerificationFailure;
}

void common_options(CLI::App* app, Overrides& o, bool solve_outputs) {
  app->add_option("-c,--config", o.config, "run-config JSON file");
  app->add_option("-o,--out", o.out, "output file (default stdout)");
  app->add_option("--seed", o.seed, "Monte-Carlo seed");
  app->add_option("--paths", o.paths, "Monte-Carlo path count");
  app->add_option("--dt", o.dt, "Monte-Carlo time step");
  app->add_option("--tol-fit", o.tol_fit, "fit-condition tolerance");
  app->add_option("--tol-vi", o.tol_vi, "variational-inequality tolerance");
  app->add_option("--lo", o.lo, "grid lower end");
  app->add_option("--hi", o.hi, "grid upper end");
  app->add_option("--n", o.n, "grid points");
  app->add_flag("--timings", o.timings, "include wall-clock timings in the JSON");
  if (solve_outputs) {
    app->add_option("--value-csv", o.value_csv, "value-function grid CSV");
    app->add_option("--curves-csv", o.curves_csv, "Lambda/lambda curve family CSV");
    app->add_option("--from-solution", o.from_solution,
                    "re-use the solution stored in a previous JSON result instead of solving");
  }
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"levyctl: two-threshold control problems for spectrally negative Levy processes"};
  app.require_subcommand(1);
  Overrides o;
  auto* st = app.add_subcommand("scale-table", "CSV of x, W, W', Z, Wbar, Zbar, Theta on the grid");
  common_options(st, o, false);
  auto* ss = app.add_subcommand("solve-singular", "two-sided singular control");
  common_options(ss, o, true);
  auto* si = app.add_subcommand("solve-impulse", "(s,S) impulse control");
  common_options(si, o, true);
  auto* sg = app.add_subcommand("solve-game", "CDS cancellation game");
  common_options(sg, o, true);
  auto* ve = app.add_subcommand("verify", "variational-inequality and Monte-Carlo checks");
  common_options(ve, o, false);
  ve->add_flag("--mc", o.mc, "add the Monte-Carlo comparison table");
  ve->add_option("--mc-csv", o.mc_csv, "Monte-Carlo comparison CSV");
  ve->add_flag("--serial", o.serial, "run Monte-Carlo on the serial reference path");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? Ok : ValidationFailure;
  }
  try {
    if (st->parsed()) return scale_table(o);
    if (ss->parsed()) return solve_singular(o);
    if (si->parsed()) return solve_impulse(o);
    if (sg->parsed()) return solve_game(o);
    return verify(o);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ValidationFailure;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ValidationFailure;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ValidationFailure;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return SolverFailure;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return SolverFailure;
  }
}

}  // namespace levyctl::cli
