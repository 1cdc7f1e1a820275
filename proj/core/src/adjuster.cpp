#include "carefree/adjuster.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

namespace carefree {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest s for which exp(s) stays finite, with margin.
constexpr double kMaxLogArgument = 700.0;

// Beyond kMaxLogArgument, A(E)/E is frozen at its value at the largest finite E.
double generic_scaled(const Adjuster::Map& map, double s) {
  if (s > kMaxLogArgument) {
    constexpr double kLargest = std::numeric_limits<double>::max();
    return map(kLargest) / kLargest;
  }
  return map(std::exp(s)) * std::exp(-s);
}

}  // namespace

double adjuster_a1(double e) {
  if (std::isnan(e)) throw std::invalid_argument("adjuster input is NaN");
  if (e < 1.0) return 0.0;
  if (std::isinf(e)) return kInf;
  const double h = e - 1.0;
  const double u = std::log1p(h);
  if (u < 1e-4) {
    // (e^u - 1 - u) / u^2 expanded around u = 0
    return 0.5 + u * (1.0 / 6.0 + u * (1.0 / 24.0 + u / 120.0));
  }
  return (h - u) / (u * u);
}

double adjuster_a2(double e) {
  if (std::isnan(e)) throw std::invalid_argument("adjuster input is NaN");
  if (e < 1.0) return 0.0;
  return std::sqrt(e) - 1.0;
}

Adjuster::Adjuster(std::string name, Map map, Map scaled)
    : name_(std::move(name)), map_(std::move(map)), scaled_(std::move(scaled)) {}

Adjuster Adjuster::a1() {
  return Adjuster("A1", adjuster_a1, [](double s) {
    if (s < 1.0) return adjuster_a1(std::exp(s)) * std::exp(-s);
    return -std::expm1(-s) / (s * s) - std::exp(-s) / s;  // (1 - (1+s) e^{-s}) / s^2
  });
}

Adjuster Adjuster::a2() {
  return Adjuster("A2", adjuster_a2,
                  [](double s) { return std::exp(-0.5 * s) - std::exp(-s); });
}

Adjuster Adjuster::identity() {
  return Adjuster(
      "identity",
      [](double e) {
        if (std::isnan(e)) throw std::invalid_argument("adjuster input is NaN");
        return e < 1.0 ? 0.0 : e;
      },
      [](double) { return 1.0; });
}

Adjuster Adjuster::custom(std::string name, Map map) {
  if (!map) throw std::invalid_argument("custom adjuster needs a callable");
  Map guarded = [inner = map](double e) {
    if (std::isnan(e)) throw std::invalid_argument("adjuster input is NaN");
    return e < 1.0 ? 0.0 : inner(e);
  };
  Map scaled = [inner = map](double s) { return generic_scaled(inner, s); };
  return Adjuster(std::move(name), std::move(guarded), std::move(scaled));
}

Adjuster Adjuster::by_name(const std::string& name) {
  if (name == "A1") return a1();
  if (name == "A2") return a2();
  if (name == "identity") return identity();
  throw std::invalid_argument("unknown adjuster '" + name + "' (expected A1 or A2)");
}

double Adjuster::operator()(double e) const { return map_(e); }

double Adjuster::scaled_at_log(double s) const { return scaled_(s); }

AdjustedPanel adjust(const RunningMaxPanel& maxima, const Adjuster& adj) {
  ValueGrid adjusted(maxima.hypotheses(), maxima.horizon() + 1);
  for (std::size_t k = 0; k < maxima.hypotheses(); ++k) {
    const auto in = maxima.values().row(k);
    auto out = adjusted.row(k);
    for (std::size_t t = 0; t < in.size(); ++t) out[t] = adj(in[t]);
  }
  return AdjustedPanel(std::move(adjusted), maxima.truth());
}

AdmissibilityReport check_admissible(const Adjuster& adj, double tolerance) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");

  AdmissibilityReport report;
  report.adjuster = adj.name();

  // E = exp(s), s = v / (1 - v):  dE / E^2 = e^{-s} ds,  ds = dv / (1 - v)^2.
  const auto integrand = [&adj](double v) {
    const double tail = 1.0 - v;
    const double s = v / tail;
    return adj.scaled_at_log(s) / (tail * tail);
  };

  try {
    double error = 0.0;
    double l1 = 0.0;
    report.integral = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        integrand, 0.0, 1.0, 20, 1e-12, &error, &l1);
    report.error_estimate = error;
    report.converged = std::isfinite(report.integral) && std::isfinite(error) &&
                       error <= 1e-3 * tolerance;
    if (!report.converged) {
      report.diagnostic = fmt::format("quadrature did not converge (error estimate {:g})", error);
    }
  } catch (const std::exception& ex) {
    report.converged = false;
    report.diagnostic = fmt::format("quadrature failed: {}", ex.what());
  }

  report.monotone = true;
  double previous = adj(1.0);
  constexpr int kGridPoints = 4000;
  for (int i = 1; i <= kGridPoints; ++i) {
    const double e = std::pow(10.0, 12.0 * i / kGridPoints);
    const double current = adj(e);
    if (std::isnan(current) || current < previous) {
      report.monotone = false;
      if (report.diagnostic.empty()) {
        report.diagnostic = fmt::format("decreases near E = {:g}", e);
      }
      break;
    }
    previous = current;
  }

  report.infinite_at_infinity = std::isinf(adj(kInf));

  const bool integral_ok = report.converged && std::abs(report.integral - 1.0) <= tolerance;
  if (report.converged && !integral_ok && report.diagnostic.empty()) {
    report.diagnostic = fmt::format("integral {:.12g} is not 1", report.integral);
  }
  report.admissible = integral_ok && report.monotone && report.infinite_at_infinity;
  return report;
}

}  // namespace carefree
