#pragma once

#include "cavity_packets/core_model.hpp"

#include <vector>

namespace cavity_packets {

/// Photon-number distribution P_n, n = 0..n_max, traced over the emitter.
struct PhotonDistribution {
  std::vector<double> probs;
  double time = 0.0;

  int n_max() const { return static_cast<int>(probs.size()) - 1; }
  double total() const;
  double mean() const;
};

/// Values in [-1e-12, 0) are roundoff and clamp to zero; anything more
/// negative throws PositivityViolation.
PhotonDistribution photon_distribution(const PureState& psi, double time = 0.0);
PhotonDistribution photon_distribution(const DensityMatrix& rho, double time = 0.0);
PhotonDistribution make_distribution(std::vector<double> probs, double time = 0.0);

double mean_photon_number(const PureState& psi);
double mean_photon_number(const DensityMatrix& rho);
double mean_photon_number(const PhotonDistribution& dist);

/// Partial trace over the two-level system.
CMatrix reduce_photonic(const DensityMatrix& rho);

/// Uniform phase-space grid for W(z). z is the coherent amplitude, so the
/// vacuum is (2/pi) exp(-2|z|^2) and |alpha> peaks at z = alpha.
struct GridSpec {
  double re_min = -12.0;
  double re_max = 12.0;
  double im_min = -12.0;
  double im_max = 12.0;
  int re_points = 201;
  int im_points = 201;

  void validate() const;
  double re_step() const;
  double im_step() const;
  /// Largest |z| anywhere on the grid.
  double max_abs() const;
};

struct WignerGrid {
  std::vector<double> re_axis;
  std::vector<double> im_axis;
  Eigen::MatrixXd values;  ///< values(i, j) = W(re_axis[i] + i im_axis[j])

  /// Riemann sum of W over the grid.
  double integral() const;
  double min() const;
  double max() const;
};

/// W(z) = (2/pi) Tr[rho D(z) P D(z)^dagger] with P the photon parity, using
/// the closed-form Laguerre matrix elements of the displaced parity. Only the
/// Hermitian part of rho_phot contributes.
double wigner_at(const CMatrix& rho_phot, Complex z);

/// Throws GridTooSmall unless every photon level with population above
/// 1e-8 satisfies n < max|z|^2 / 2.
WignerGrid wigner(const CMatrix& rho_phot, const GridSpec& grid = {});

}  // namespace cavity_packets
