#include "levyctl/mc_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "levyctl/errors.hpp"

namespace levyctl::mc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kChunk = 1024;
// barrier reach in diffusive standard deviations
constexpr double kReach = 6.0;
constexpr double kMaxStep = 1e-2;

constexpr const char* kExactNote =
    "barriers handled within each step by the Brownian-bridge extremum; bias only from "
    "neglecting both barriers in one step";
constexpr const char* kMonitoredNote =
    "thresholds monitored at step ends, steps shrink to dt near them; bias O(sqrt(dt))";

/// Diffusive part of one step, for the Brownian-bridge corrections: var is
/// sigma^2 h (0 without a Gaussian part).
struct Bridge {
  double var;
  PathRng* rng;
  /// P(free bridge from distance d0 to d1 above a level touches it)
  double touch(double d0, double d1) const {
    if (!(d0 > 0.0) || !(d1 > 0.0)) return 1.0;
    return var > 0.0 ? std::exp(-2.0 * d0 * d1 / var) : 0.0;
  }
  bool touched(double d0, double d1) const {
    const double p = touch(d0, d1);
    return p >= 1.0 || (p > 0.0 && rng->uniform() < p);
  }
  /// Minimum (sign = -1) or maximum (sign = +1) of the bridge from x0 to x1.
  double extremum(double x0, double x1, double sign) const {
    if (!(var > 0.0)) return sign < 0 ? std::min(x0, x1) : std::max(x0, x1);
    const double u = 1.0 - rng->uniform();  // in (0, 1]
    return 0.5 * (x0 + x1 + sign * std::sqrt((x1 - x0) * (x1 - x0) - 2.0 * var * std::log(u)));
  }
};

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void require_hyperexponential(const LevyModel& m) {
  if (!m.is_hyperexponential())
    throw ValidationError("Monte-Carlo simulation supports hyperexponential jumps only");
}

void check_config(const SimConfig& cfg, double q) {
  if (!(cfg.dt > 0.0)) throw ValidationError("SimConfig.dt must be > 0");
  if (cfg.n_paths < 2) throw ValidationError("SimConfig.n_paths must be >= 2");
  if (cfg.antithetic && cfg.n_paths % 2 != 0)
    throw ValidationError("SimConfig.n_paths must be even with antithetic pairs");
  if (!(q > 0.0)) throw ValidationError("q must be > 0");
  if (cfg.t_max != 0.0 && !(q * cfg.t_max >= 18.0))
    throw ValidationError("SimConfig.t_max must satisfy q * t_max >= 18");
}

struct Moments {
  double n = 0.0, mean = 0.0, m2 = 0.0;
  void add(double v) {
    n += 1.0;
    const double d = v - mean;
    mean += d / n;
    m2 += d * (v - mean);
  }
  void merge(const Moments& o) {
    if (o.n == 0.0) return;
    const double tot = n + o.n;
    const double d = o.mean - mean;
    mean += d * o.n / tot;
    m2 += o.m2 + d * d * n * o.n / tot;
    n = tot;
  }
};

/// Runs sample(i, rng) for every sample index; one sample is one path, or an
/// antithetic pair averaged. Chunks are reduced in index order.
template <int K, class PathFn>
std::array<McEstimate, K> estimate(const SimConfig& cfg, const char* note, PathFn path) {
  const std::int64_t n_samples = cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths;
  const std::int64_t n_chunks = (n_samples + kChunk - 1) / kChunk;
  std::vector<std::array<Moments, K>> parts(static_cast<std::size_t>(n_chunks));
  auto run_chunk = [&](std::int64_t c) {
    std::array<Moments, K> acc{};
    const std::int64_t end = std::min(n_samples, (c + 1) * kChunk);
    for (std::int64_t i = c * kChunk; i < end; ++i) {
      std::array<double, K> v{};
      if (cfg.antithetic) {
        PathRng r1(cfg.seed, static_cast<std::uint64_t>(i), false);
        PathRng r2(cfg.seed, static_cast<std::uint64_t>(i), true);
        const auto a = path(r1);
        const auto b = path(r2);
        for (int k = 0; k < K; ++k) v[k] = 0.5 * (a[k] + b[k]);
      } else {
        PathRng r(cfg.seed, static_cast<std::uint64_t>(i), false);
        v = path(r);
      }
      for (int k = 0; k < K; ++k) acc[k].add(v[k]);
    }
    parts[static_cast<std::size_t>(c)] = acc;
  };
  if (cfg.parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    for (std::int64_t c = 0; c < n_chunks; ++c) run_chunk(c);
  }
  std::array<Moments, K> tot{};
  for (const auto& p : parts)
    for (int k = 0; k < K; ++k) tot[k].merge(p[k]);
  std::array<McEstimate, K> out;
  for (int k = 0; k < K; ++k) {
    out[k].mean = tot[k].mean;
    out[k].std_error = std::sqrt(tot[k].m2 / (tot[k].n - 1.0) / tot[k].n);
    out[k].n_paths = cfg.n_paths;
    out[k].dt = cfg.dt;
    out[k].bias_note = note;
  }
  return out;
}

/// Path engine. A policy supplies:
///   distance(x)                  distance the diffusion must not cover in one step
///   upper()                      level the drift may hit exactly when sigma = 0
///   bool step(x0, x1&, h, br)    after a diffusive move; true stops the path
///   bool jump(x&)                after a jump; true stops the path
///   kill(x)                      at the killing time
template <class Policy>
void run_path(const LevyModel& m, double q, const SimConfig& cfg, double x, PathRng& rng,
              Policy& pol) {
  const double sigma = m.sigma();
  const double c = m.linear_coefficient();
  double total_rate = 0.0;
  for (const auto& j : m.jumps()) total_rate += j.rate;
  const double t_max = cfg.t_max > 0.0 ? cfg.t_max : 20.0 / q;
  const double t_kill = std::min(rng.exponential() / q, t_max);
  double t_jump = total_rate > 0.0 ? rng.exponential() / total_rate : kInf;
  const double h_max = std::max(cfg.dt, kMaxStep);
  double t = 0.0;
  while (true) {
    const double d = pol.distance(x);
    double h;
    bool lands_on_upper = false;
    if (sigma > 0.0) {
      h = d / (kReach * sigma);
      h *= h;
      if (c != 0.0) h = std::min(h, 0.5 * d / std::abs(c));
      h = std::clamp(h, cfg.dt, h_max);
    } else {
      h = h_max;
      const double u = pol.upper();
      if (c > 0.0 && x < u && (u - x) / c <= h) {
        h = (u - x) / c;
        lands_on_upper = true;
      }
    }
    const double t_next = std::min(t_kill, t_jump);
    if (t + h >= t_next) {
      h = t_next - t;
      lands_on_upper = false;
    }
    double x1 = lands_on_upper ? pol.upper() : x + c * h + (sigma > 0.0 ? sigma * std::sqrt(h) * rng.normal() : 0.0);
    t += h;
    if (pol.step(x, x1, h, Bridge{sigma * sigma * h, &rng})) return;
    x = x1;
    if (t >= t_kill) {
      pol.kill(x);
      return;
    }
    if (t >= t_jump) {
      double pick = rng.uniform() * total_rate;
      const ExpJump* jj = &m.jumps().back();
      for (const auto& j : m.jumps()) {
        if (pick < j.rate) {
          jj = &j;
          break;
        }
        pick -= j.rate;
      }
      x -= rng.exponential() / jj->decay;
      if (pol.jump(x)) return;
      t_jump = t + rng.exponential() / total_rate;
    }
  }
}

// Both barriers are bridge-exact, so only the farther one limits the step.
struct ExitPolicy {
  double lo, hi;
  double up = 0.0, down = 0.0;
  double distance(double x) const { return std::max(x - lo, hi - x); }
  double upper() const { return hi; }
  bool check(double x) {
    if (x >= hi) {
      up = 1.0;
      return true;
    }
    if (x < lo) {
      down = 1.0;
      return true;
    }
    return false;
  }
  bool step(double x0, double& x1, double, const Bridge& br) {
    if (check(x1)) return true;
    if (br.touched(x0 - lo, x1 - lo)) {
      down = 1.0;
      return true;
    }
    if (std::isfinite(hi) && br.touched(hi - x0, hi - x1)) {
      up = 1.0;
      return true;
    }
    return false;
  }
  bool jump(double& x) { return check(x); }
  void kill(double) {}
};

struct ReflectPolicy {
  double a, b;
  const PiecewisePolynomial* f;
  double U = 0.0, D = 0.0, running = 0.0;
  double distance(double x) const { return std::max(x - a, b - x); }
  double upper() const { return b; }
  bool step(double x0, double& x1, double h, const Bridge& br) {
    // Skorokhod push at the nearer barrier from the free path's extremum
    if (x0 - a <= b - x0) {
      const double push = std::max(0.0, a - br.extremum(x0, x1, -1.0));
      U += push;
      x1 += push;
    } else {
      const double push = std::max(0.0, br.extremum(x0, x1, 1.0) - b);
      D += push;
      x1 -= push;
    }
    if (x1 < a) {
      U += a - x1;
      x1 = a;
    } else if (x1 > b) {
      D += x1 - b;
      x1 = b;
    }
    if (f) running += 0.5 * h * ((*f)(x0) + (*f)(x1));
    return false;
  }
  bool jump(double& x) {
    if (x < a) {
      U += a - x;
      x = a;
    }
    return false;
  }
  void kill(double) {}
};

struct LowerKilledPolicy {
  double a, b;
  double U = 0.0;
  double distance(double x) const { return std::max(x - a, b - x); }
  double upper() const { return b; }
  bool step(double x0, double& x1, double, const Bridge& br) {
    if (x0 - a <= b - x0) {
      const double push = std::max(0.0, a - br.extremum(x0, x1, -1.0));
      U += push;
      x1 += push;
    }
    if (x1 >= b || br.touched(b - x0, b - x1)) return true;
    if (x1 < a) {
      U += a - x1;
      x1 = a;
    }
    return false;
  }
  bool jump(double& x) {
    if (x < a) {
      U += a - x;
      x = a;
    }
    return false;
  }
  void kill(double) {}
};

struct SSPolicy {
  double s, S, C_U, K;
  const PiecewisePolynomial* f;
  double cost = 0.0, count = 0.0;
  double distance(double x) const { return x - s; }
  double upper() const { return kInf; }
  void intervene(double& x) {
    if (x < s) {
      cost += C_U * (S - x) + K;
      count += 1.0;
      x = S;
    }
  }
  bool step(double x0, double& x1, double h, const Bridge&) {
    // running cost accrues on the pre-intervention path
    cost += 0.5 * h * ((*f)(x0) + (*f)(x1));
    intervene(x1);
    return false;
  }
  bool jump(double& x) {
    intervene(x);
    return false;
  }
  void kill(double) {}
};

struct GamePolicy {
  const GameSpec* spec;
  double alpha, beta;
  GamePayoffForm form;
  double elapsed = 0.0, payoff = 0.0;
  double distance(double x) const { return std::min(x - alpha, beta - x); }
  double upper() const { return beta; }
  bool check(double x) {
    if (x > beta) {
      payoff = form == GamePayoffForm::Contract ? -spec->gamma_S : payoffs(*spec, x).g_S;
      return true;
    }
    if (x < 0.0) {
      payoff = form == GamePayoffForm::Contract ? 1.0 : 0.0;
      return true;
    }
    if (x < alpha) {
      payoff = form == GamePayoffForm::Contract ? spec->gamma_I : payoffs(*spec, x).g_I;
      return true;
    }
    return false;
  }
  bool step(double, double& x1, double h, const Bridge&) {
    elapsed += h;
    return check(x1);
  }
  bool jump(double& x) { return check(x); }
  void kill(double) {}
  double result() const {
    return form == GamePayoffForm::Contract ? payoff - spec->p * elapsed : payoff;
  }
};

}  // namespace

PathRng::PathRng(std::uint64_t seed, std::uint64_t index, bool mirror)
    : eng_(splitmix64(seed ^ splitmix64(index))), mirror_(mirror) {}

double PathRng::normal() {
  boost::random::normal_distribution<double> nd;
  const double z = nd(eng_);
  return mirror_ ? -z : z;
}

double PathRng::exponential() {
  boost::random::exponential_distribution<double> ed;
  return ed(eng_);
}

double PathRng::uniform() {
  boost::random::uniform_01<double> u;
  return u(eng_);
}

double simulate_increment(const LevyModel& model, double dt, PathRng& rng) {
  require_hyperexponential(model);
  if (!(dt > 0.0)) throw ValidationError("dt must be > 0");
  double dx = model.linear_coefficient() * dt;
  if (model.sigma() > 0.0) dx += model.sigma() * std::sqrt(dt) * rng.normal();
  for (const auto& j : model.jumps()) {
    boost::random::poisson_distribution<int, double> pd(j.rate * dt);
    const int n = pd(rng.engine());
    if (n > 0) {
      boost::random::gamma_distribution<double> gd(n, 1.0 / j.decay);
      dx -= gd(rng.engine());
    }
  }
  return dx;
}

McEstimate exit_up(const LevyModel& model, double q, double x, double b, const SimConfig& cfg) {
  require_hyperexponential(model);
  check_config(cfg, q);
  if (!(b > 0.0) || x > b) throw ValidationError("exit_up requires 0 < b and x <= b");
  return estimate<1>(cfg, kExactNote, [&](PathRng& rng) {
    ExitPolicy pol{0.0, b};
    if (!pol.check(x)) run_path(model, q, cfg, x, rng, pol);
    return std::array<double, 1>{pol.up};
  })[0];
}

McEstimate exit_down(const LevyModel& model, double q, double x, double b, const SimConfig& cfg) {
  require_hyperexponential(model);
  check_config(cfg, q);
  if (!(b > 0.0) || x > b) throw ValidationError("exit_down requires 0 < b and x <= b");
  return estimate<1>(cfg, kExactNote, [&](PathRng& rng) {
    ExitPolicy pol{0.0, b};
    if (!pol.check(x)) run_path(model, q, cfg, x, rng, pol);
    return std::array<double, 1>{pol.down};
  })[0];
}

ExitPair exit_two_sided(const LevyModel& model, double q, double x, double b,
                        const SimConfig& cfg) {
  require_hyperexponential(model);
  check_config(cfg, q);
  if (!(b > 0.0) || x > b) throw ValidationError("exit_two_sided requires 0 < b and x <= b");
  const auto r = estimate<2>(cfg, kExactNote, [&](PathRng& rng) {
    ExitPolicy pol{0.0, b};
    if (!pol.check(x)) run_path(model, q, cfg, x, rng, pol);
    return std::array<double, 2>{pol.up, pol.down};
  });
  return {r[0], r[1]};
}

McEstimate ruin_laplace(const LevyModel& model, double q, double x, const SimConfig& cfg) {
  require_hyperexponential(model);
  check_config(cfg, q);
  return estimate<1>(cfg, kExactNote, [&](PathRng& rng) {
    ExitPolicy pol{0.0, kInf};
    if (!pol.check(x)) run_path(model, q, cfg, x, rng, pol);
    return std::array<double, 1>{pol.down};
  })[0];
}

McEstimate npv_doubly_reflected(const LevyModel& model, double q, double a, double b,
                                const PiecewisePolynomial& f, double C_U, double C_D, double x,
                                const SimConfig& cfg) {
  require_hyperexponential(model);
  check_config(cfg, q);
  if (!(a < b)) throw ValidationError("npv_doubly_reflected requires a < b");
  return estimate<1>(cfg, kExactNote, [&](PathRng& rng) {
    ReflectPolicy pol{a, b, &f};
    double x0 = x;
    pol.jump(x0);  // start below a: immediate push
    if (x0 > b) {
      pol.D += x0 - b;
      x0 = b;
    }
    run_path(model, q, cfg, x0, rng, pol);
    return std::array<double, 1>{pol.running + C_U * pol.U + C_D * pol.D};
  })[0];
}

ReflectedControls doubly_reflected_controls(const LevyModel& model, double q, double a, double b,
                                            double x, const SimConfig& cfg) {
  require_hyperexponential(model);
  check_config(cfg, q);
  if (!(a < b)) throw ValidationError("doubly_reflected_controls requires a < b");
  const auto r = estimate<2>(cfg, kExactNote, [&](PathRng& rng) {
    ReflectPolicy pol{a, b, nullptr};
    double x0 = x;
    pol.jump(x0);
    if (x0 > b) {
      pol.D += x0 - b;
      x0 = b;
    }
    run_path(model, q, cfg, x0, rng, pol);
    return std::array<double, 2>{pol.D, pol.U};
  });
  return {r[0], r[1]};
}

McEstimate injection_reflected_lower(const LevyModel& model, double q, double a, double b,
                                     double x, const SimConfig& cfg) {
  require_hyperexponential(model);
  check_config(cfg, q);
  if (!(a < b) || x > b) throw ValidationError("injection_reflected_lower requires a < b, x <= b");
  return estimate<1>(cfg, kExactNote, [&](PathRng& rng) {
    LowerKilledPolicy pol{a, b};
    double x0 = x;
    pol.jump(x0);
    run_path(model, q, cfg, x0, rng, pol);
    return std::array<double, 1>{pol.U};
  })[0];
}

SSResult npv_sS(const LevyModel& model, double q, double s, double S, const PiecewisePolynomial& f,
                double C_U, double K, double x, const SimConfig& cfg) {
  require_hyperexponential(model);
  check_config(cfg, q);
  if (!(s < S)) throw ValidationError("npv_sS requires s < S");
  const auto r = estimate<2>(cfg, kMonitoredNote, [&](PathRng& rng) {
    SSPolicy pol{s, S, C_U, K, &f};
    double x0 = x;
    pol.intervene(x0);
    run_path(model, q, cfg, x0, rng, pol);
    return std::array<double, 2>{pol.cost, pol.count};
  });
  return {r[0], r[1]};
}

McEstimate game_payoff(const GameSpec& spec, double alpha, double beta, double x,
                       const SimConfig& cfg, GamePayoffForm form) {
  const auto& model = spec.family.model();
  const double q = spec.family.q();
  require_hyperexponential(model);
  check_config(cfg, q);
  if (!(alpha >= 0.0) || !(alpha < beta)) throw ValidationError("game_payoff requires 0 <= alpha < beta");
  return estimate<1>(cfg, kMonitoredNote, [&](PathRng& rng) {
    GamePolicy pol{&spec, alpha, beta, form};
    if (!pol.check(x)) run_path(model, q, cfg, x, rng, pol);
    return std::array<double, 1>{pol.result()};
  })[0];
}

double dt_allowance(double dt, double scale) { return 2.0 * std::sqrt(dt) * scale; }

}  // namespace levyctl::mc
