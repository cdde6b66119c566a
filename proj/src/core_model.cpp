#include "cavity_packets/core_model.hpp"

#include "cavity_packets/errors.hpp"

#include <Eigen/Eigenvalues>

#include <charconv>
#include <cmath>
#include <string>

namespace cavity_packets {

namespace {

void require(bool ok, const char* key, const std::string& what) {
  if (!ok) throw ConfigError(std::string(key) + ": " + what);
}

// Lift a 2x2 TLS operator (basis G=0, X=1) to the product space.
CMatrix lift_tls(const Eigen::Matrix2cd& op, int n_max) {
  const int dim = 2 * (n_max + 1);
  CMatrix out = CMatrix::Zero(dim, dim);
  for (int n = 0; n <= n_max; ++n) {
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        out(2 * n + r, 2 * n + c) = op(r, c);
      }
    }
  }
  return out;
}

}  // namespace

void SystemParams::validate() const {
  require(std::isfinite(f_drive) && f_drive >= 0.0, "f_drive", "must be finite and >= 0");
  require(std::isfinite(delta), "delta", "must be finite");
  require(std::isfinite(dxl), "dxl", "must be finite");
  require(std::isfinite(kappa) && kappa >= 0.0, "kappa", "must be finite and >= 0");
  require(std::isfinite(gamma_rd) && gamma_rd >= 0.0, "gamma_rd", "must be finite and >= 0");
  require(std::isfinite(gamma_pd) && gamma_pd >= 0.0, "gamma_pd", "must be finite and >= 0");
  require(n_max >= 8, "n_max", "must be >= 8");
  require(std::isfinite(coupling) && coupling >= 0.0, "coupling", "must be finite and >= 0");
}

double DensityMatrix::hermiticity_error() const {
  return (elements - elements.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::purity() const { return (elements * elements).trace().real(); }

TridiagonalHamiltonian hamiltonian_bands(const SystemParams& params) {
  params.validate();
  const int dim = params.dim();
  TridiagonalHamiltonian h;
  h.diag.resize(dim);
  h.off.resize(dim - 1);
  for (int n = 0; n <= params.n_max; ++n) {
    h.diag[flatten(Tls::G, n)] = params.delta * n;
    h.diag[flatten(Tls::X, n)] = params.delta * n + params.dxl;
    h.off[flatten(Tls::G, n)] = -params.f_drive;
    if (n < params.n_max) h.off[flatten(Tls::X, n)] = params.coupling * std::sqrt(static_cast<double>(n + 1));
  }
  return h;
}

OperatorSet build_operators(const SystemParams& params) {
  params.validate();
  const int dim = params.dim();
  OperatorSet ops;

  ops.a_op = CMatrix::Zero(dim, dim);
  for (int n = 1; n <= params.n_max; ++n) {
    const double s = std::sqrt(static_cast<double>(n));
    ops.a_op(flatten(Tls::G, n - 1), flatten(Tls::G, n)) = s;
    ops.a_op(flatten(Tls::X, n - 1), flatten(Tls::X, n)) = s;
  }
  ops.a_dag = ops.a_op.adjoint();

  Eigen::Matrix2cd sp = Eigen::Matrix2cd::Zero();
  sp(1, 0) = 1.0;  // |X><G|
  ops.sigma_plus = lift_tls(sp, params.n_max);
  ops.sigma_minus = lift_tls(sp.adjoint(), params.n_max);
  ops.sigma3 = ops.sigma_plus * ops.sigma_minus - ops.sigma_minus * ops.sigma_plus;

  ops.hamiltonian = params.dxl * ops.sigma_plus * ops.sigma_minus +
                    params.delta * ops.a_dag * ops.a_op +
                    params.coupling * (ops.a_op * ops.sigma_plus + ops.a_dag * ops.sigma_minus) -
                    params.f_drive * (ops.sigma_plus + ops.sigma_minus);
  return ops;
}

InitialState InitialState::parse(std::string_view text) {
  auto parse_n = [&](std::string_view digits) {
    int n = 0;
    const auto* end = digits.data() + digits.size();
    auto [ptr, ec] = std::from_chars(digits.data(), end, n);
    if (ec != std::errc() || ptr != end || n < 0) {
      throw ConfigError("initial_state: bad photon number in '" + std::string(text) + "'");
    }
    return n;
  };
  if (text == "ground" || text == "bare_ground") return {Kind::BareGround, 0};
  if (text == "lds_plus" || text == "plus") return {Kind::LdsPlus, 0};
  if (text == "lds_minus" || text == "minus") return {Kind::LdsMinus, 0};
  if (text.starts_with("fock:")) return {Kind::Fock, parse_n(text.substr(5))};
  if (text.starts_with("excited_fock:")) return {Kind::ExcitedFock, parse_n(text.substr(13))};
  throw ConfigError("initial_state: unknown kind '" + std::string(text) + "'");
}

std::string InitialState::to_string() const {
  switch (kind) {
    case Kind::BareGround: return "ground";
    case Kind::LdsPlus: return "lds_plus";
    case Kind::LdsMinus: return "lds_minus";
    case Kind::Fock: return "fock:" + std::to_string(n);
    case Kind::ExcitedFock: return "excited_fock:" + std::to_string(n);
  }
  return "ground";
}

PureState prepare_state(const InitialState& kind, int n_max) {
  if (n_max < 0) throw ConfigError("n_max: must be >= 0");
  PureState psi{CVector::Zero(2 * (n_max + 1))};
  const double h = 1.0 / std::sqrt(2.0);
  switch (kind.kind) {
    case InitialState::Kind::BareGround:
      psi.amplitudes(flatten(Tls::G, 0)) = 1.0;
      break;
    case InitialState::Kind::LdsPlus:
      psi.amplitudes(flatten(Tls::G, 0)) = h;
      psi.amplitudes(flatten(Tls::X, 0)) = h;
      break;
    case InitialState::Kind::LdsMinus:
      psi.amplitudes(flatten(Tls::G, 0)) = h;
      psi.amplitudes(flatten(Tls::X, 0)) = -h;
      break;
    case InitialState::Kind::Fock:
    case InitialState::Kind::ExcitedFock:
      if (kind.n > n_max) {
        throw TruncationError("Fock state n=" + std::to_string(kind.n) +
                              " exceeds n_max=" + std::to_string(n_max));
      }
      psi.amplitudes(flatten(kind.kind == InitialState::Kind::Fock ? Tls::G : Tls::X, kind.n)) = 1.0;
      break;
  }
  return psi;
}

PureState coherent_state(Complex alpha, int n_max, Tls tls) {
  PureState psi{CVector::Zero(2 * (n_max + 1))};
  // log-space Poisson amplitudes avoid overflow of alpha^n / sqrt(n!)
  const double r = std::abs(alpha);
  const double phase = std::arg(alpha);
  for (int n = 0; n <= n_max; ++n) {
    double log_mag = -0.5 * r * r - 0.5 * std::lgamma(n + 1.0);
    if (n > 0) log_mag += (r > 0.0 ? n * std::log(r) : -INFINITY);
    psi.amplitudes(flatten(tls, n)) = std::polar(std::exp(log_mag), n * phase);
  }
  psi.amplitudes /= psi.amplitudes.norm();
  return psi;
}

DensityMatrix to_density(const PureState& psi) {
  return DensityMatrix{psi.amplitudes * psi.amplitudes.adjoint()};
}

double min_eigenvalue(const DensityMatrix& rho) {
  const CMatrix herm = 0.5 * (rho.elements + rho.elements.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace cavity_packets
