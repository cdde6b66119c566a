#pragma once

#include "cavity_packets/core_model.hpp"

#include <Eigen/SparseCore>

#include <functional>
#include <optional>
#include <vector>

namespace cavity_packets {

/// Fixed RK4 step size and output cadence. Times are in units of 1/g.
struct TimeGrid {
  double t_final = 300.0;
  double dt = 1e-3;
  int output_stride = 100;

  void validate() const;
  long long steps() const;
};

struct EvolveOptions {
  bool store_states = false;         ///< keep full state snapshots at each stride
  bool store_distributions = true;   ///< keep P_n at each stride
  bool check_truncation = true;
  bool enforce_stability_rule = true;
  int guard_levels = 10;             ///< top photon levels watched by the truncation guard
  double guard_tolerance = 1e-8;
  double norm_drift_tolerance = 1e-4;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<double> mean_n;
  std::vector<double> norm;         ///< |psi|^2 or Tr rho
  std::vector<double> pop_excited;  ///< TLS excited-state population
  std::vector<double> energy;       ///< <H>
  std::vector<std::vector<double>> distributions;  ///< P_n per stride (optional)
  std::vector<PureState> pure_states;              ///< optional
  std::vector<DensityMatrix> density_states;       ///< optional

  std::size_t size() const { return times.size(); }
};

/// Left-hand side of the stability rule; dt times this must not exceed 0.5.
double stability_scale(const SystemParams& params);
double max_stable_dt(const SystemParams& params);

/// Photon-diagonal occupation of the top `levels` Fock levels.
double top_level_occupation(const PureState& psi, int levels);
double top_level_occupation(const DensityMatrix& rho, int levels);

/// RK4 integration of i dpsi/dt = H psi.
Trajectory evolve_schrodinger(const SystemParams& params, const PureState& psi0,
                              const TimeGrid& grid, const EvolveOptions& options = {});

/// RK4 integration of the Lindblad master equation with cavity loss,
/// radiative decay and pure dephasing. rho is symmetrised at each stride.
Trajectory evolve_lindblad(const SystemParams& params, const DensityMatrix& rho0,
                           const TimeGrid& grid, const EvolveOptions& options = {});

/// Right-hand side of the master equation, exposed for tests.
CMatrix lindblad_rhs(const SystemParams& params, const CMatrix& rho);

struct StationaryOptions {
  double tolerance = 1e-7;  ///< entrywise L1 change over one relaxation window
  /// Scales the default time limit 50 / min(positive rates).
  double time_limit_factor = 1.0;
  /// Raise TruncationOverflow when the converged state leaves more than
  /// guard_tolerance in the top guard_levels photon levels.
  bool guard_truncation = false;
  int guard_levels = 10;
  double guard_tolerance = 1e-8;
  /// Start the relaxation windows from the Liouvillian null vector when the
  /// sparse solve succeeds; rho0 is used otherwise.
  bool seed_with_null_vector = true;
  /// Called after every relaxation window with (t, change).
  std::function<void(double, double)> on_window;
};

struct StationaryState {
  DensityMatrix rho;
  double time = 0.0;      ///< integration time until convergence
  double residual = 0.0;  ///< last window change
  bool seeded = false;    ///< relaxation started from the null-vector solve
  double top_occupation = 0.0;  ///< occupation of the top guard_levels photon levels
};

/// Column-major vectorised master-equation generator, d vec(rho)/dt = L vec(rho).
Eigen::SparseMatrix<Complex> liouvillian_matrix(const SystemParams& params);

/// Unit-trace null vector of the Liouvillian via sparse LU. Returns nothing
/// when the factorisation fails or the result is not a valid density matrix.
std::optional<DensityMatrix> solve_null_state(const SystemParams& params);

/// Integrates until ||rho(t + w) - rho(t)||_1 < tolerance with the window
/// w = 1 / max(positive rates). Throws NoConvergence past the time limit.
StationaryState find_stationary(const SystemParams& params, const DensityMatrix& rho0, double dt,
                                const StationaryOptions& options = {});

}  // namespace cavity_packets
