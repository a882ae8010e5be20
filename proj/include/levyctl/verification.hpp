#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace levyctl {

enum class CheckStatus { Pass, Warn, Fail, Skip };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Warn: return "WARN";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Skip: return "SKIP";
  }
  return "?";
}

struct CheckItem {
  std::string name;
  std::string region;
  double x;
  double value;  // residual or slack
  double tol;
  CheckStatus status;
};

/// Flat list of pointwise checks.
struct VerificationReport {
  std::vector<CheckItem> items;

  void add(std::string name, std::string region, double x, double value, double tol,
           CheckStatus status) {
    items.push_back({std::move(name), std::move(region), x, value, tol, status});
  }
  /// |value| <= tol
  void equal(const std::string& name, const std::string& region, double x, double value,
             double tol, CheckStatus on_fail = CheckStatus::Fail) {
    add(name, region, x, value, tol, std::abs(value) <= tol ? CheckStatus::Pass : on_fail);
  }
  /// value >= -tol
  void nonneg(const std::string& name, const std::string& region, double x, double value,
              double tol, CheckStatus on_fail = CheckStatus::Fail) {
    add(name, region, x, value, tol, value >= -tol ? CheckStatus::Pass : on_fail);
  }
  int count(CheckStatus s) const {
    return static_cast<int>(
        std::count_if(items.begin(), items.end(), [s](const CheckItem& c) { return c.status == s; }));
  }
  bool ok() const { return count(CheckStatus::Fail) == 0; }
  void merge(const VerificationReport& other) {
    items.insert(items.end(), other.items.begin(), other.items.end());
  }
};

}  // namespace levyctl
