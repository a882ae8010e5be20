#pragma once

#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "levyctl/game.hpp"
#include "levyctl/impulse_control.hpp"
#include "levyctl/levy_model.hpp"
#include "levyctl/scale_function.hpp"
#include "levyctl/sim_config.hpp"
#include "levyctl/singular_control.hpp"

namespace levyctl {

struct ModelConfig {
  double sigma = 0.0;
  std::optional<double> gamma;
  std::optional<double> delta;
  std::vector<ExpJump> jumps;
};

struct SingularConfig {
  PiecewisePolynomial f;
  double C_U = 0.0;
  double C_D = 0.0;
  Interval I;
};

struct ImpulseConfig {
  PiecewisePolynomial f;
  double C_U = 0.0;
  double K = 0.0;
};

struct GameConfig {
  double p = 0.0;
  double gamma_S = 0.0;
  double gamma_I = 0.0;
};

struct GridConfig {
  double lo = 0.0;
  double hi = 2.0;
  int n = 21;
};

struct OutputConfig {
  std::string json;
  std::string value_csv;
  std::string curves_csv;
  std::string mc_csv;
};

struct VerifyConfig {
  /// Starting point of the Monte-Carlo policy comparison; NaN picks a problem default.
  double x = std::numeric_limits<double>::quiet_NaN();
  bool mc = false;
};

/// Parsed run configuration. Exactly one problem block, or none for
/// scale-table and the model-only checks of verify.
struct RunConfig {
  ModelConfig model;
  double q = 0.0;
  Backend backend = Backend::PartialFraction;
  std::variant<std::monostate, SingularConfig, ImpulseConfig, GameConfig> problem;
  GridConfig grid;
  OutputConfig output;
  VerifyConfig verify;
  SimConfig mc;
  double tol_fit = 1e-8;
  double tol_vi = 1e-5;
};

/// Throws ValidationError whose message starts with the offending field path.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::string& path);

LevyModel build_model(const RunConfig& cfg);
ScaleFamily build_family(const RunConfig& cfg);
SingularProblem singular_problem(const RunConfig& cfg);
ImpulseProblem impulse_problem(const RunConfig& cfg);
GameSpec game_spec(const RunConfig& cfg);

/// Canonical JSON echo of the configuration (the solver inputs only).
nlohmann::json to_json(const RunConfig& cfg);
nlohmann::json to_json(const PiecewisePolynomial& f);

}  // namespace levyctl
