#include "levyctl/run_config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "levyctl/errors.hpp"

namespace levyctl {

namespace {

using nlohmann::json;
constexpr double kInf = std::numeric_limits<double>::infinity();

/// A JSON object together with its dotted path, for diagnostics.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ValidationError((path_.empty() ? std::string("<root>") : path_) + ": " + msg);
  }
  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!ok.count(it.key())) throw ValidationError(at(it.key()) + ": unknown field");
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  const json& raw(const std::string& key) const { return j_.at(key); }

  Node child(const std::string& key) const {
    if (!j_.contains(key)) fail("missing field '" + key + "'");
    return Node(j_.at(key), at(key));
  }

  double number(const std::string& key) const {
    if (!has(key)) fail("missing field '" + key + "'");
    return as_number(j_.at(key), at(key));
  }
  double number(const std::string& key, double def) const { return has(key) ? number(key) : def; }

  std::string string(const std::string& key, const std::string& def) const {
    if (!has(key)) return def;
    if (!j_.at(key).is_string()) throw ValidationError(at(key) + ": expected a string");
    return j_.at(key).get<std::string>();
  }

  bool boolean(const std::string& key, bool def) const {
    if (!has(key)) return def;
    if (!j_.at(key).is_boolean()) throw ValidationError(at(key) + ": expected true or false");
    return j_.at(key).get<bool>();
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ValidationError(path + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ValidationError(path + ": must be finite");
    return d;
  }

 private:
  const json& j_;
  std::string path_;
};

std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw ValidationError(path + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(Node::as_number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

PiecewisePolynomial parse_poly(const json& v, const std::string& path) {
  if (v.is_array()) {
    auto c = number_list(v, path);
    if (c.empty()) throw ValidationError(path + ": needs at least one coefficient");
    return PiecewisePolynomial(std::move(c));
  }
  Node n(v, path);
  n.allow({"breaks", "pieces"});
  auto breaks = n.has("breaks") ? number_list(n.raw("breaks"), n.at("breaks")) : std::vector<double>{};
  if (!n.has("pieces")) n.fail("missing field 'pieces'");
  const json& pj = n.raw("pieces");
  if (!pj.is_array()) throw ValidationError(n.at("pieces") + ": expected an array of coefficient arrays");
  std::vector<std::vector<double>> pieces;
  for (std::size_t i = 0; i < pj.size(); ++i)
    pieces.push_back(number_list(pj[i], n.at("pieces") + "[" + std::to_string(i) + "]"));
  if (pieces.size() != breaks.size() + 1)
    throw ValidationError(path + ": needs breaks.size() + 1 pieces");
  try {
    return PiecewisePolynomial(std::move(breaks), std::move(pieces));
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

Interval parse_interval(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2)
    throw ValidationError(path + ": expected [lo, hi] (null for an infinite end)");
  Interval I;
  I.lo = v[0].is_null() ? -kInf : Node::as_number(v[0], path + "[0]");
  I.hi = v[1].is_null() ? kInf : Node::as_number(v[1], path + "[1]");
  if (!(I.lo < I.hi)) throw ValidationError(path + ": requires lo < hi");
  return I;
}

json interval_json(const Interval& I) {
  return json::array({std::isfinite(I.lo) ? json(I.lo) : json(nullptr),
                      std::isfinite(I.hi) ? json(I.hi) : json(nullptr)});
}

template <class F>
auto with_path(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  } catch (const PreconditionError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
  Node root(doc, "");
  root.allow({"model", "q", "backend", "problem", "grid", "output", "verify", "mc", "tolerances"});
  RunConfig cfg;

  Node m = root.child("model");
  m.allow({"sigma", "gamma", "delta", "jumps"});
  cfg.model.sigma = m.number("sigma", 0.0);
  if (m.has("gamma") && m.has("delta")) m.fail("give either gamma or delta, not both");
  if (m.has("gamma")) cfg.model.gamma = m.number("gamma");
  if (m.has("delta")) cfg.model.delta = m.number("delta");
  if (!cfg.model.gamma && !cfg.model.delta) cfg.model.gamma = 0.0;
  if (m.has("jumps")) {
    const json& js = m.raw("jumps");
    if (!js.is_array()) throw ValidationError(m.at("jumps") + ": expected an array of [rate, decay]");
    for (std::size_t i = 0; i < js.size(); ++i) {
      const std::string p = m.at("jumps") + "[" + std::to_string(i) + "]";
      auto rd = number_list(js[i], p);
      if (rd.size() != 2) throw ValidationError(p + ": expected [rate, decay]");
      cfg.model.jumps.push_back({rd[0], rd[1]});
    }
  }
  cfg.q = root.number("q");
  if (!(cfg.q > 0.0)) throw ValidationError("q: must be > 0");
  const std::string backend = root.string("backend", "partial_fraction");
  if (backend == "partial_fraction") cfg.backend = Backend::PartialFraction;
  else if (backend == "laplace_inversion") cfg.backend = Backend::LaplaceInversion;
  else throw ValidationError("backend: expected 'partial_fraction' or 'laplace_inversion'");
  with_path("model", [&] { return build_model(cfg); });

  if (root.has("problem")) {
    Node p = root.child("problem");
    const std::string type = p.string("type", "");
    if (type == "singular") {
      p.allow({"type", "f", "C_U", "C_D", "interval"});
      SingularConfig s;
      s.f = p.has("f") ? parse_poly(p.raw("f"), p.at("f")) : PiecewisePolynomial();
      s.C_U = p.number("C_U");
      s.C_D = p.number("C_D");
      if (p.has("interval")) s.I = parse_interval(p.raw("interval"), p.at("interval"));
      cfg.problem = s;
      with_path("problem", [&] {
        validate(singular_problem(cfg));
        return 0;
      });
    } else if (type == "impulse") {
      p.allow({"type", "f", "C_U", "K"});
      ImpulseConfig s;
      s.f = p.has("f") ? parse_poly(p.raw("f"), p.at("f")) : PiecewisePolynomial();
      s.C_U = p.number("C_U", 0.0);
      s.K = p.number("K");
      cfg.problem = s;
      with_path("problem", [&] {
        validate(impulse_problem(cfg));
        return 0;
      });
    } else if (type == "game") {
      p.allow({"type", "p", "gamma_S", "gamma_I"});
      GameConfig g;
      g.p = p.number("p");
      g.gamma_S = p.number("gamma_S");
      g.gamma_I = p.number("gamma_I");
      cfg.problem = g;
      with_path("problem", [&] {
        validate(game_spec(cfg));
        return 0;
      });
    } else {
      throw ValidationError(p.at("type") + ": expected 'singular', 'impulse' or 'game'");
    }
  }

  if (root.has("grid")) {
    Node g = root.child("grid");
    g.allow({"lo", "hi", "n"});
    cfg.grid.lo = g.number("lo", cfg.grid.lo);
    cfg.grid.hi = g.number("hi", cfg.grid.hi);
    const double n = g.number("n", cfg.grid.n);
    if (n != std::floor(n) || n < 2 || n > 1e6) throw ValidationError("grid.n: must be an integer in [2, 1e6]");
    cfg.grid.n = static_cast<int>(n);
    if (!(cfg.grid.lo < cfg.grid.hi)) throw ValidationError("grid: requires lo < hi");
  }

  if (root.has("output")) {
    Node o = root.child("output");
    o.allow({"json", "value_csv", "curves_csv", "mc_csv"});
    cfg.output.json = o.string("json", "");
    cfg.output.value_csv = o.string("value_csv", "");
    cfg.output.curves_csv = o.string("curves_csv", "");
    cfg.output.mc_csv = o.string("mc_csv", "");
  }

  if (root.has("verify")) {
    Node v = root.child("verify");
    v.allow({"x", "mc"});
    cfg.verify.x = v.number("x", cfg.verify.x);
    cfg.verify.mc = v.boolean("mc", false);
  }

  if (root.has("mc")) {
    Node c = root.child("mc");
    c.allow({"dt", "paths", "seed", "antithetic", "t_max", "parallel"});
    cfg.mc.dt = c.number("dt", cfg.mc.dt);
    const double paths = c.number("paths", static_cast<double>(cfg.mc.n_paths));
    if (paths != std::floor(paths) || paths < 2 || paths > 1e9)
      throw ValidationError("mc.paths: must be an integer in [2, 1e9]");
    cfg.mc.n_paths = static_cast<std::int64_t>(paths);
    if (c.has("seed")) {
      const json& s = c.raw("seed");
      if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0))
        throw ValidationError("mc.seed: expected a nonnegative integer");
      cfg.mc.seed = s.get<std::uint64_t>();
    }
    cfg.mc.antithetic = c.boolean("antithetic", false);
    cfg.mc.parallel = c.boolean("parallel", true);
    cfg.mc.t_max = c.number("t_max", 0.0);
  }
  if (!(cfg.mc.dt > 0.0)) throw ValidationError("mc.dt: must be > 0");
  if (cfg.mc.antithetic && cfg.mc.n_paths % 2) throw ValidationError("mc.paths: must be even with antithetic pairs");
  if (cfg.mc.t_max != 0.0 && !(cfg.q * cfg.mc.t_max >= 18.0))
    throw ValidationError("mc.t_max: must satisfy q * t_max >= 18");

  if (root.has("tolerances")) {
    Node t = root.child("tolerances");
    t.allow({"tol_fit", "tol_vi"});
    cfg.tol_fit = t.number("tol_fit", cfg.tol_fit);
    cfg.tol_vi = t.number("tol_vi", cfg.tol_vi);
  }
  if (!(cfg.tol_fit > 0.0)) throw ValidationError("tolerances.tol_fit: must be > 0");
  if (!(cfg.tol_vi > 0.0)) throw ValidationError("tolerances.tol_vi: must be > 0");
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open config file");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": malformed JSON: " + e.what());
  }
  return parse_run_config(doc);
}

LevyModel build_model(const RunConfig& cfg) {
  const auto& m = cfg.model;
  return m.delta ? LevyModel::with_delta(m.sigma, *m.delta, m.jumps)
                 : LevyModel::with_gamma(m.sigma, m.gamma.value_or(0.0), m.jumps);
}

ScaleFamily build_family(const RunConfig& cfg) {
  return ScaleFamily(build_model(cfg), cfg.q, cfg.backend);
}

SingularProblem singular_problem(const RunConfig& cfg) {
  const auto* s = std::get_if<SingularConfig>(&cfg.problem);
  if (!s) throw ValidationError("problem: expected a singular problem block");
  return SingularProblem{build_family(cfg), s->f, s->C_U, s->C_D, s->I};
}

ImpulseProblem impulse_problem(const RunConfig& cfg) {
  const auto* s = std::get_if<ImpulseConfig>(&cfg.problem);
  if (!s) throw ValidationError("problem: expected an impulse problem block");
  return ImpulseProblem{build_family(cfg), s->f, s->C_U, s->K};
}

GameSpec game_spec(const RunConfig& cfg) {
  const auto* g = std::get_if<GameConfig>(&cfg.problem);
  if (!g) throw ValidationError("problem: expected a game problem block");
  return GameSpec{build_family(cfg), g->p, g->gamma_S, g->gamma_I};
}

json to_json(const PiecewisePolynomial& f) {
  json pieces = json::array();
  for (const auto& p : f.pieces()) pieces.push_back(p);
  return json{{"breaks", f.breakpoints()}, {"pieces", pieces}};
}

json to_json(const RunConfig& cfg) {
  json model{{"sigma", cfg.model.sigma}};
  if (cfg.model.delta) model["delta"] = *cfg.model.delta;
  else model["gamma"] = cfg.model.gamma.value_or(0.0);
  json jumps = json::array();
  for (const auto& j : cfg.model.jumps) jumps.push_back({j.rate, j.decay});
  model["jumps"] = jumps;
  json out{{"model", model},
           {"q", cfg.q},
           {"backend", to_string(cfg.backend)},
           {"grid", {{"lo", cfg.grid.lo}, {"hi", cfg.grid.hi}, {"n", cfg.grid.n}}}};
  if (const auto* s = std::get_if<SingularConfig>(&cfg.problem)) {
    out["problem"] = {{"type", "singular"}, {"f", to_json(s->f)}, {"C_U", s->C_U},
                      {"C_D", s->C_D}, {"interval", interval_json(s->I)}};
  } else if (const auto* s = std::get_if<ImpulseConfig>(&cfg.problem)) {
    out["problem"] = {{"type", "impulse"}, {"f", to_json(s->f)}, {"C_U", s->C_U}, {"K", s->K}};
  } else if (const auto* g = std::get_if<GameConfig>(&cfg.problem)) {
    out["problem"] = {{"type", "game"}, {"p", g->p}, {"gamma_S", g->gamma_S}, {"gamma_I", g->gamma_I}};
  }
  return out;
}

}  // namespace levyctl
