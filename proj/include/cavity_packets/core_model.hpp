#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <string_view>
#include <vector>

namespace cavity_packets {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Model constants in units of the light-matter coupling g (g = hbar = 1).
/// Times are therefore measured in 1/g.
struct SystemParams {
  double f_drive = 0.0;   ///< laser driving strength of the two-level system
  double delta = 0.0;     ///< laser-cavity detuning
  double dxl = 0.0;       ///< laser-emitter detuning
  double kappa = 0.0;     ///< cavity loss rate
  double gamma_rd = 0.0;  ///< radiative decay rate
  double gamma_pd = 0.0;  ///< pure dephasing rate
  int n_max = 160;        ///< highest photon number kept in the Fock basis
  /// Light-matter coupling relative to g. Stays 1 in every physical run;
  /// 0 switches the Jaynes-Cummings term off for decoupled reference checks.
  double coupling = 1.0;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;

  int dim() const { return 2 * (n_max + 1); }
  bool dissipative() const { return kappa > 0.0 || gamma_rd > 0.0 || gamma_pd > 0.0; }
};

enum class Tls { G, X };

/// Position of a bare product state |tls, n> in the flat amplitude vector.
struct HilbertIndex {
  Tls tls = Tls::G;
  int n = 0;

  friend bool operator==(const HilbertIndex&, const HilbertIndex&) = default;
};

constexpr int flatten(Tls tls, int n) { return 2 * n + (tls == Tls::X ? 1 : 0); }
constexpr int flatten(HilbertIndex idx) { return flatten(idx.tls, idx.n); }
constexpr HilbertIndex unflatten(int flat) {
  return HilbertIndex{(flat % 2 == 1) ? Tls::X : Tls::G, flat / 2};
}

struct PureState {
  CVector amplitudes;

  int n_max() const { return static_cast<int>(amplitudes.size()) / 2 - 1; }
  Complex amplitude(Tls tls, int n) const { return amplitudes(flatten(tls, n)); }
  double norm() const { return amplitudes.norm(); }
};

struct DensityMatrix {
  CMatrix elements;

  int n_max() const { return static_cast<int>(elements.rows()) / 2 - 1; }
  Complex trace() const { return elements.trace(); }
  /// max |rho - rho^dagger|
  double hermiticity_error() const;
  double purity() const;
};

/// Dense operators over the bare product basis.
struct OperatorSet {
  CMatrix hamiltonian;
  CMatrix a_op;
  CMatrix a_dag;
  CMatrix sigma_plus;
  CMatrix sigma_minus;
  CMatrix sigma3;
};

/// In flat ordering the Hamiltonian is real symmetric tridiagonal:
/// |G,n> couples to |X,n> through the drive and |X,n> to |G,n+1>
/// through the cavity. Dynamics works on this band form directly.
struct TridiagonalHamiltonian {
  std::vector<double> diag;
  std::vector<double> off;  ///< off[k] couples flat k and k+1

  int dim() const { return static_cast<int>(diag.size()); }
};

TridiagonalHamiltonian hamiltonian_bands(const SystemParams& params);

OperatorSet build_operators(const SystemParams& params);

/// Initial-state recipes understood by prepare_state and the config parser.
struct InitialState {
  enum class Kind { BareGround, LdsPlus, LdsMinus, Fock, ExcitedFock };

  Kind kind = Kind::BareGround;
  int n = 0;  ///< photon number for the Fock kinds

  static InitialState parse(std::string_view text);
  std::string to_string() const;
};

PureState prepare_state(const InitialState& kind, int n_max);

/// |tls> (x) |alpha>, built from the analytic Poisson amplitudes and
/// renormalised on the truncated space.
PureState coherent_state(Complex alpha, int n_max, Tls tls = Tls::G);

DensityMatrix to_density(const PureState& psi);

/// Smallest eigenvalue of the Hermitian part of rho.
double min_eigenvalue(const DensityMatrix& rho);

}  // namespace cavity_packets
