#include "cavity_packets/dressed_analytics.hpp"

#include "cavity_packets/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace cavity_packets {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_drive(double f, double delta) {
  if (!(f > 0.0) || !std::isfinite(f)) throw ConfigError("f_drive must be positive for the dressed-state formulas");
  if (!std::isfinite(delta)) throw ConfigError("delta must be finite");
  if (std::abs(std::abs(delta) - 2.0 * f) <= 1e-9) {
    throw PoleAtTwoF("|delta| = " + std::to_string(delta) + " hits the pole at 2f");
  }
}

double theta_of(double f, double delta) {
  return 0.25 * (1.0 / (2.0 * f + delta) + 1.0 / (2.0 * f - delta));
}

// Omega = delta sqrt(1 -+ 2 theta/delta) written as sign(delta) sqrt(delta^2 -+ 2 theta delta)
// so delta = 0 is regular.
BranchFrequency branch_frequency(double delta, double theta, Branch branch) {
  const double s = branch == Branch::Plus ? 1.0 : -1.0;
  const double radicand = delta * delta - s * 2.0 * theta * delta;
  const double sign = delta < 0.0 ? -1.0 : 1.0;
  return BranchFrequency{sign * std::sqrt(std::abs(radicand)), radicand < 0.0};
}

double stable_omega(double f, double delta, Branch branch) {
  check_drive(f, delta);
  const BranchFrequency w = branch_frequency(delta, theta_of(f, delta), branch);
  if (w.imaginary || w.value == 0.0) {
    throw UnstableBranch(std::string("Omega") + (branch == Branch::Plus ? "+" : "-") +
                         " is not a real nonzero frequency at delta = " + std::to_string(delta));
  }
  return w.value;
}

}  // namespace

LdsReport lds_report(double f, double delta, const DressedThresholds& thresholds) {
  check_drive(f, delta);
  LdsReport r;
  r.f = f;
  r.delta = delta;
  r.theta = theta_of(f, delta);
  r.omega_plus = branch_frequency(delta, r.theta, Branch::Plus);
  r.omega_minus = branch_frequency(delta, r.theta, Branch::Minus);
  r.stable_plus = r.omega_plus.stable();
  r.stable_minus = r.omega_minus.stable();

  const auto squeeze = [&](const BranchFrequency& w, double s, double& chi, double& zeta) {
    if (w.imaginary) {
      chi = kNaN;
      zeta = kNaN;
      return;
    }
    chi = 0.5 * std::asinh(s * r.theta / w.value);
    zeta = s / (2.0 * w.value) * std::exp(-chi);
  };
  squeeze(r.omega_plus, 1.0, r.chi_plus, r.zeta_plus);
  squeeze(r.omega_minus, -1.0, r.chi_minus, r.zeta_minus);

  const double sum = 2.0 * f + delta;
  const double diff = 2.0 * f - delta;
  r.p1 = 0.5 / sum;
  r.q1 = -0.5 / diff;
  r.p2 = 0.25 / (sum * (f + delta));
  r.q2 = -0.25 / (diff * (f - delta));
  r.r2 = 0.25 / (2.0 * f) * (1.0 / sum - 1.0 / diff);

  r.amplitude = delta == 0.0 ? kInf : 1.0 / (delta * delta);
  r.validity_threshold = thresholds.validity_factor / (4.0 * f);
  r.validity_lds = std::abs(delta) >= r.validity_threshold;
  return r;
}

double lds_mean_photon(double f, double delta, Branch branch, double t) {
  const double omega = stable_omega(f, delta, branch);
  const double theta = theta_of(f, delta);
  const double s = branch == Branch::Plus ? 1.0 : -1.0;
  const double d2 = delta * delta;
  const double lead = (1.0 - std::cos(omega * t)) / (2.0 * d2);
  const double second = theta / (2.0 * d2) * (theta + s / (2.0 * omega)) * (1.0 - std::cos(2.0 * omega * t)) / 2.0;
  return lead + second;
}

std::complex<double> lds_trajectory(double f, double delta, double t) {
  const double omega = stable_omega(f, delta, Branch::Plus);
  return {-(1.0 - std::cos(omega * t)) / (std::numbers::sqrt2 * delta),
          -std::sin(omega * t) / (std::numbers::sqrt2 * omega)};
}

double dephasing_trail_reach(double f, double delta, double t_release) {
  const std::complex<double> z0 = lds_trajectory(f, delta, t_release);
  const double theta = theta_of(f, delta);
  // On the |-> branch H = (delta + 2 theta)/2 P^2 + delta/2 (Q - c)^2.
  const double c = 1.0 / (std::numbers::sqrt2 * delta);
  const double kp = delta + 2.0 * theta;
  const double q0 = z0.real() - c;
  const double p0 = z0.imag();
  const double energy = 0.5 * kp * p0 * p0 + 0.5 * delta * q0 * q0;
  const double a2 = 2.0 * energy / delta;
  const double b2 = 2.0 * energy / kp;
  if (a2 < 0.0 || b2 < 0.0) return kInf;
  const double a = std::sqrt(a2);
  const double b = std::sqrt(b2);
  double best = 0.0;
  constexpr int kSamples = 1 << 14;
  for (int i = 0; i < kSamples; ++i) {
    const double phi = 2.0 * std::numbers::pi * i / kSamples;
    const double q = c + a * std::cos(phi);
    const double p = b * std::sin(phi);
    best = std::max(best, 0.5 * (q * q + p * p));
  }
  return best;
}

CdsReport cds_report(double f, double delta, const DressedThresholds& thresholds) {
  if (!(f > 0.0) || !std::isfinite(f)) throw ConfigError("f_drive must be positive for the dressed-state formulas");
  if (!std::isfinite(delta)) throw ConfigError("delta must be finite");
  CdsReport r;
  r.f = f;
  r.delta = delta;
  r.threshold_eighth = 1.0 / (8.0 * f);
  r.threshold_quarter = 1.0 / (4.0 * f);
  r.threshold_split = 1.0 / f;

  // (1/2delta)^2 (sqrt(1 + x) -+ 1)^2 with x = 8 f delta, rearranged so
  // delta -> 0 carries no cancellation.
  const double x = 8.0 * f * delta;
  const double inv_d2 = delta == 0.0 ? kInf : 1.0 / (delta * delta);
  r.n_plus_up = delta > -r.threshold_eighth ? 16.0 * f * f / std::pow(std::sqrt(1.0 + x) + 1.0, 2) : inv_d2;
  r.n_minus_up = delta < r.threshold_eighth ? 16.0 * f * f / std::pow(std::sqrt(1.0 - x) + 1.0, 2) : inv_d2;
  if (delta > 0.0) {
    r.n_tilde_lo = inv_d2;
    r.n_tilde_hi = std::pow(std::sqrt(1.0 + x) + 1.0, 2) / (4.0 * delta * delta);
  } else {
    r.n_tilde_lo = kInf;
    r.n_tilde_hi = kInf;
  }
  r.split_flag = std::abs(delta) >= r.threshold_split;

  const double halfwidth = thresholds.window_halfwidth_factor * r.threshold_eighth;
  r.in_bimodal_window = std::abs(delta - r.threshold_quarter) <= halfwidth;
  if (r.in_bimodal_window) {
    r.regime = StationaryRegime::Bimodal;
  } else if (delta < r.threshold_quarter) {
    r.regime = StationaryRegime::SinglePacketLow;
  } else {
    r.regime = StationaryRegime::SinglePacketHigh;
  }
  r.stationary_low = f * f;
  r.stationary_high = delta == 0.0 ? kInf : 0.25 * inv_d2;
  return r;
}

double cds_frequency(double delta, int n, Branch branch) {
  const double s = branch == Branch::Plus ? 1.0 : -1.0;
  return delta * n + s * std::sqrt(static_cast<double>(n));
}

const char* to_string(StationaryRegime regime) {
  switch (regime) {
    case StationaryRegime::SinglePacketLow: return "single_low";
    case StationaryRegime::Bimodal: return "bimodal";
    case StationaryRegime::SinglePacketHigh: return "single_high";
  }
  return "unknown";
}

}  // namespace cavity_packets
