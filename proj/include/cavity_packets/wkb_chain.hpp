#pragma once

#include "cavity_packets/dressed_analytics.hpp"

#include <Eigen/Dense>

#include <vector>

namespace cavity_packets {

/// Tight-binding chain omega_n c_n + (xi/2)(c_{n+1} + c_{n-1}) = lambda c_n
/// on sites n = 0..M with hard walls beyond both ends.
struct ChainSpec {
  std::vector<double> omegas;
  double xi = 0.0;

  int size() const { return static_cast<int>(omegas.size()); }
  void validate() const;

  /// Cavity-dressed chain: omega_n = delta n +- sqrt(n), xi = -+f.
  static ChainSpec cavity_dressed(double f, double delta, Branch branch, int m);
};

struct ChainModes {
  Eigen::VectorXd eigenvalues;   ///< ascending
  Eigen::MatrixXd eigenvectors;  ///< column k belongs to eigenvalues(k), unit norm
};

ChainModes chain_eigensolve(const ChainSpec& spec);

enum class SiteKind { Oscillatory, Evanescent };

struct SiteRange {
  int lo = 0;
  int hi = 0;  ///< inclusive
};

struct RegionMap {
  double lambda = 0.0;
  std::vector<SiteKind> sites;
  /// Site indices where the label changes; each entry is the first site
  /// of the new label.
  std::vector<int> turning_points;
  std::vector<SiteRange> oscillatory;
};

/// Site n is oscillatory iff |lambda - omega_n| <= |xi|.
RegionMap classify_region(const ChainSpec& spec, double lambda);

/// Share of the mode's norm on the oscillatory sites of its own region map,
/// each range widened by `margin` sites.
double confined_fraction(const ChainModes& modes, const ChainSpec& spec, int k, int margin);

struct DecaySide {
  int mode = 0;
  double lambda = 0.0;
  int turning_point = 0;  ///< last oscillatory site before the evanescent stretch
  int direction = 0;      ///< +1 towards larger n, -1 towards smaller n
  int sites = 0;          ///< evanescent sites used for the fit
  double slope = 0.0;     ///< least-squares slope of log|c_n| per site away from the turning point
  bool monotone = false;  ///< |c_n| strictly decreasing away from the turning point
};

struct DecayReport {
  std::vector<DecaySide> sides;

  bool all_monotone() const;
  bool all_decaying() const;  ///< every fitted slope is negative
};

/// For modes with lambda in [lambda_lo, lambda_hi], inspects up to
/// `fit_sites` evanescent sites beyond each end of the oscillatory range that
/// holds most of the mode.
DecayReport decay_verification(const ChainModes& modes, const ChainSpec& spec, double lambda_lo,
                               double lambda_hi, int fit_sites = 10);

/// Largest shift of the eigenvalues in [lambda_lo, lambda_hi] when the
/// cavity-dressed chain is doubled in length, matching each to its nearest
/// partner on the longer chain.
double boundary_drift(double f, double delta, Branch branch, int m, double lambda_lo,
                      double lambda_hi);

}  // namespace cavity_packets
