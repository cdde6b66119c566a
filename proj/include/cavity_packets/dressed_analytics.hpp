#pragma once

#include <complex>

namespace cavity_packets {

enum class Branch { Plus, Minus };

/// Effective oscillator frequency of one laser-dressed branch. When the
/// branch is unstable the frequency is imaginary: Omega = i * value.
struct BranchFrequency {
  double value = 0.0;
  bool imaginary = false;

  bool stable() const { return !imaginary; }
};

/// Thresholds that turn the paper's "much greater" and "approximately"
/// into numbers. Reported alongside the raw values.
struct DressedThresholds {
  double validity_factor = 4.0;  ///< LDS picture valid when |delta| >= factor * g^2/(4f)
  double window_halfwidth_factor = 1.0;  ///< bimodal window |delta - g^2/4f| <= factor * g^2/8f
};

struct LdsReport {
  double f = 0.0;
  double delta = 0.0;
  double theta = 0.0;
  BranchFrequency omega_plus;
  BranchFrequency omega_minus;
  /// Bogoliubov squeezing parameters and displacement scales; NaN on an
  /// unstable branch.
  double chi_plus = 0.0;
  double chi_minus = 0.0;
  double zeta_plus = 0.0;
  double zeta_minus = 0.0;
  double p1 = 0.0;
  double q1 = 0.0;
  double p2 = 0.0;
  double q2 = 0.0;
  double r2 = 0.0;
  double amplitude = 0.0;  ///< (g/delta)^2, infinite at delta = 0
  double validity_threshold = 0.0;
  bool validity_lds = false;
  bool stable_plus = false;
  bool stable_minus = false;
};

/// Throws ConfigError for f <= 0 and PoleAtTwoF when |delta| is within 1e-9 of 2f.
LdsReport lds_report(double f, double delta, const DressedThresholds& thresholds = {});

/// Two-harmonic mean photon number of the isolated branch started from the
/// photon vacuum. Throws UnstableBranch when Omega is imaginary.
double lds_mean_photon(double f, double delta, Branch branch, double t);

/// Phase-space centre of the |+> packet in quadrature units, z = Q + iP,
/// so |z|^2/2 is the photon number. Throws UnstableBranch when Omega+ is imaginary.
std::complex<double> lds_trajectory(double f, double delta, double t);

/// Largest photon number reached by the piece of the |+> packet that pure
/// dephasing moves onto the |-> branch at time t_release. Released at the
/// turning point pi/Omega+ this is 4 g^2/delta^2 to leading order.
double dephasing_trail_reach(double f, double delta, double t_release);

enum class StationaryRegime { SinglePacketLow, Bimodal, SinglePacketHigh };

struct CdsReport {
  double f = 0.0;
  double delta = 0.0;
  double threshold_eighth = 0.0;   ///< g^2/8f
  double threshold_quarter = 0.0;  ///< g^2/4f
  double threshold_split = 0.0;    ///< g^2/f
  double n_plus_up = 0.0;          ///< upper turning point of the C+ packet
  double n_minus_up = 0.0;         ///< upper turning point of the C- packet
  double n_tilde_lo = 0.0;         ///< lower edge of the lambda ~ +f C- modes
  double n_tilde_hi = 0.0;         ///< upper edge of the lambda ~ +f C- modes
  bool split_flag = false;         ///< |delta| >= g^2/f
  StationaryRegime regime = StationaryRegime::SinglePacketLow;
  bool in_bimodal_window = false;
  double stationary_low = 0.0;   ///< (f/g)^2
  double stationary_high = 0.0;  ///< (g/2delta)^2
};

CdsReport cds_report(double f, double delta, const DressedThresholds& thresholds = {});

/// Cavity-dressed eigenfrequencies delta n +- g sqrt(n).
double cds_frequency(double delta, int n, Branch branch);

const char* to_string(StationaryRegime regime);

}  // namespace cavity_packets
