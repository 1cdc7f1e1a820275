#pragma once

// Adjusters: nondecreasing maps A on [1, inf] with A(inf) = inf and
// integral_1^inf A(E) / E^2 dE = 1. Applied to a running maximum they give
// back an e-process.

#include <functional>
#include <string>

#include "carefree/panel.hpp"

namespace carefree {

class Adjuster {
 public:
  using Map = std::function<double(double)>;

  /// A1(E) = (E - 1 - log E) / log^2 E, with A1(1) = 1/2 by continuity.
  static Adjuster a1();
  /// A2(E) = sqrt(E) - 1.
  static Adjuster a2();
  /// A(E) = E. Not admissible (the integral diverges); kept as a negative control.
  static Adjuster identity();
  /// User-supplied map on [1, inf).
  static Adjuster custom(std::string name, Map map);

  /// Looks up "A1", "A2" or "identity". Throws std::invalid_argument otherwise.
  static Adjuster by_name(const std::string& name);

  const std::string& name() const noexcept { return name_; }

  /// A(E) for E >= 1 and 0 for E < 1. Throws std::invalid_argument on NaN.
  double operator()(double e) const;

  /// A(e^s) e^{-s} for s >= 0: the admissibility integrand after E = e^s.
  /// Closed forms keep it finite where e^s overflows.
  double scaled_at_log(double s) const;

 private:
  Adjuster(std::string name, Map map, Map scaled);

  std::string name_;
  Map map_;
  Map scaled_;
};

double adjuster_a1(double e);
double adjuster_a2(double e);

/// Elementwise A(M^k_t).
AdjustedPanel adjust(const RunningMaxPanel& maxima, const Adjuster& adj);

struct AdmissibilityReport {
  std::string adjuster;
  double integral = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
  bool monotone = false;
  bool infinite_at_infinity = false;
  bool admissible = false;
  std::string diagnostic;
};

/// Evaluates integral_1^inf A(E)/E^2 dE with adaptive Gauss-Kronrod after
/// the substitution E = exp(v / (1 - v)), v in [0, 1), scans monotonicity on
/// a log-spaced grid over [1, 1e12], and checks A(inf) = inf. Admissible iff
/// all three hold and |integral - 1| <= tolerance.
AdmissibilityReport check_admissible(const Adjuster& adj, double tolerance = 1e-6);

}  // namespace carefree
