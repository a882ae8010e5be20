#pragma once

#include <cstdint>
#include <string>

namespace levyctl {

struct SimConfig {
  double dt = 1e-3;
  /// Safety horizon; 0 picks 20/q. Must satisfy q * t_max >= 18.
  double t_max = 0.0;
  std::int64_t n_paths = 100000;
  std::uint64_t seed = 20240601;
  bool antithetic = false;
  /// false runs the serial reference loop (same chunking, same result).
  bool parallel = true;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n_paths = 0;
  double dt = 0.0;
  std::string bias_note;
};

}  // namespace levyctl
