#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace splitlog {

// Threshold schedule: Fixed uses the closed-form beta/tau computed once at
// initialization; DataDependent recomputes them from the running
// log-determinants of the level design matrices.
enum class Variant { Fixed, DataDependent };

// Feature geometry of a synthetic instance: effective subspace rank and
// context norm range.
enum class Regime { Low, Middle, High };

struct ProblemConfig {
  int d = 3;
  int T = 2000;
  int K = 5;
  double B = 1.0;
  double kappa = 20.0;
  double lambda = 1.0;
  double delta = 0.1;
  double L_mu = 0.25;
  Variant variant = Variant::DataDependent;

  int fit_steps = 20;
  double fit_lr = 0.3;

  // Decision-rule scalings. The theoretical width multiplier alpha and
  // routing threshold tau are orders of magnitude too conservative to ever
  // trigger exploitation or elimination at benchmark horizons, so the
  // decision rule multiplies them by these documented factors. Every audited
  // bound (cardinality lemmas, concentration, pilot bound) keeps the exact
  // theoretical constants; set both to 1 to recover the literal rule.
  double width_scale = 0.005;
  double tau_scale = 20000.0;

  // 0 means "use the listing default for the variant".
  int level_override = 0;

  void validate() const {
    if (d < 1) throw std::invalid_argument("d must be >= 1");
    if (T < 2) throw std::invalid_argument("T must be >= 2");
    if (K < 1) throw std::invalid_argument("K must be >= 1");
    if (B <= 0) throw std::invalid_argument("B must be positive");
    if (kappa < 4) throw std::invalid_argument("kappa must be >= 4");
    if (lambda <= 0) throw std::invalid_argument("lambda must be positive");
    if (lambda < 1.0 / kappa)
      throw std::invalid_argument("lambda must be >= 1/kappa");
    if (delta <= 0 || delta >= 1)
      throw std::invalid_argument("delta must lie in (0,1)");
    if (L_mu <= 0 || L_mu > 0.25)
      throw std::invalid_argument("L_mu must lie in (0, 0.25]");
    if (fit_steps < 1) throw std::invalid_argument("fit_steps must be >= 1");
    if (fit_lr <= 0) throw std::invalid_argument("fit_lr must be positive");
    if (level_override < 0)
      throw std::invalid_argument("level_override must be >= 0");
    if (width_scale <= 0)
      throw std::invalid_argument("width_scale must be positive");
    if (tau_scale <= 0)
      throw std::invalid_argument("tau_scale must be positive");
  }
};

inline std::string to_string(Regime r) {
  switch (r) {
    case Regime::Low: return "low";
    case Regime::Middle: return "middle";
    case Regime::High: return "high";
  }
  throw std::logic_error("unknown regime");
}

inline Regime regime_from_string(const std::string& s) {
  if (s == "low") return Regime::Low;
  if (s == "middle") return Regime::Middle;
  if (s == "high") return Regime::High;
  throw std::invalid_argument("unknown regime: " + s);
}

inline std::string to_string(Variant v) {
  return v == Variant::Fixed ? "fixed" : "data-dependent";
}

}  // namespace splitlog
