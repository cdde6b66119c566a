#include "cavity_packets/dynamics.hpp"

#include "cavity_packets/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace cavity_packets {

namespace {

// Classic four-stage Runge-Kutta with preallocated stage buffers.
template <class State>
class Rk4 {
 public:
  explicit Rk4(const State& shape)
      : stage_(State::Zero(shape.rows(), shape.cols())),
        probe_(State::Zero(shape.rows(), shape.cols())),
        acc_(State::Zero(shape.rows(), shape.cols())) {}

  template <class Rhs>
  void step(State& y, double dt, Rhs&& rhs) {
    rhs(y, stage_);
    acc_ = y + (dt / 6.0) * stage_;
    probe_ = y + (0.5 * dt) * stage_;
    rhs(probe_, stage_);
    acc_ += (dt / 3.0) * stage_;
    probe_ = y + (0.5 * dt) * stage_;
    rhs(probe_, stage_);
    acc_ += (dt / 3.0) * stage_;
    probe_ = y + dt * stage_;
    rhs(probe_, stage_);
    y = acc_ + (dt / 6.0) * stage_;
  }

 private:
  State stage_;
  State probe_;
  State acc_;
};

// -i H psi with H in band form.
void schrodinger_rhs(const TridiagonalHamiltonian& h, const CVector& psi, CVector& out) {
  const int dim = h.dim();
  const Complex* p = psi.data();
  Complex* o = out.data();
  for (int k = 0; k < dim; ++k) {
    Complex acc = h.diag[k] * p[k];
    if (k > 0) acc += h.off[k - 1] * p[k - 1];
    if (k + 1 < dim) acc += h.off[k] * p[k + 1];
    o[k] = Complex(acc.imag(), -acc.real());
  }
}

// Element-wise master-equation generator. All coefficients are real, so the
// inner loops contain no complex-complex products. The generator maps
// Hermitian matrices to Hermitian matrices; only the upper triangle is
// evaluated and the lower one is mirrored.
class LindbladGenerator {
 public:
  explicit LindbladGenerator(const SystemParams& params)
      : h_(hamiltonian_bands(params)),
        dim_(params.dim()),
        gamma_rd_(params.gamma_rd),
        photons_(dim_),
        up_(dim_, 0.0),
        down_(dim_, 0.0),
        row_decay_(dim_),
        loss_(dim_, 0.0),
        dephase_even_(dim_, 0.0),
        dephase_odd_(dim_, 0.0) {
    for (int k = 0; k < dim_; ++k) {
      const HilbertIndex idx = unflatten(k);
      const double x = idx.tls == Tls::X ? 1.0 : 0.0;
      photons_[k] = idx.n;
      if (k > 0) up_[k] = h_.off[k - 1];
      if (k + 1 < dim_) down_[k] = h_.off[k];
      row_decay_[k] = -0.5 * params.kappa * idx.n - 0.5 * params.gamma_rd * x;
      // a rho a^dagger feeds (i, j) from (i + 2, j + 2) with sqrt((n_i + 1)(n_j + 1))
      if (k + 2 < dim_) loss_[k] = std::sqrt(params.kappa * (idx.n + 1.0));
      // pure dephasing damps coherences between |G> and |X>
      (x == 1.0 ? dephase_even_ : dephase_odd_)[k] = -params.gamma_pd;
    }
  }

  void operator()(const CMatrix& rho, CMatrix& out) const {
    const int d = dim_;
    const Complex* r = rho.data();
    Complex* o = out.data();
    const double* hd = h_.diag.data();
    const double* up = up_.data();
    const double* down = down_.data();
    const double* dec = row_decay_.data();
    const double* loss = loss_.data();
    for (int j = 0; j < d; ++j) {
      const Complex* col = r + static_cast<std::ptrdiff_t>(j) * d;
      const Complex* left = j > 0 ? col - d : col;
      const Complex* right = j + 1 < d ? col + d : col;
      const double hjj = hd[j];
      const double hl = up[j];
      const double hr = down[j];
      const double col_decay = row_decay_[j];
      const double* pd = (j % 2 == 0) ? dephase_even_.data() : dephase_odd_.data();
      Complex* oc = o + static_cast<std::ptrdiff_t>(j) * d;

      auto element = [&](int i, Complex above, Complex below) {
        const Complex comm = (hd[i] - hjj) * col[i] + up[i] * above + down[i] * below -
                             hl * left[i] - hr * right[i];
        return Complex(comm.imag(), -comm.real()) + (dec[i] + col_decay + pd[i]) * col[i];
      };

      oc[0] = element(0, Complex{}, d > 1 ? col[1] : Complex{});
      const int interior_end = std::min(j, d - 2);
      for (int i = 1; i <= interior_end; ++i) {
        const Complex comm = (hd[i] - hjj) * col[i] + up[i] * col[i - 1] + down[i] * col[i + 1] -
                             hl * left[i] - hr * right[i];
        oc[i] = Complex(comm.imag(), -comm.real()) + (dec[i] + col_decay + pd[i]) * col[i];
      }
      if (j == d - 1 && d > 1) oc[j] = element(j, col[j - 1], Complex{});

      if (j + 2 < d) {
        const Complex* feed = col + 2 * static_cast<std::ptrdiff_t>(d) + 2;
        const double lj = loss[j];
        for (int i = 0; i <= j; ++i) oc[i] += (loss[i] * lj) * feed[i];
      }
      if (gamma_rd_ > 0.0 && j % 2 == 0 && j + 1 < d) {
        // sigma_- rho sigma_+ feeds G-G entries from the X-X block
        const Complex* feed = col + d + 1;
        for (int i = 0; i <= j; i += 2) oc[i] += gamma_rd_ * feed[i];
      }
    }
    mirror_lower(out);
  }

  const TridiagonalHamiltonian& bands() const { return h_; }

 private:
  static void mirror_lower(CMatrix& m) {
    const Eigen::Index d = m.rows();
    constexpr Eigen::Index block = 32;
    for (Eigen::Index jb = 0; jb < d; jb += block) {
      for (Eigen::Index ib = jb; ib < d; ib += block) {
        const Eigen::Index jend = std::min(jb + block, d);
        const Eigen::Index iend = std::min(ib + block, d);
        for (Eigen::Index j = jb; j < jend; ++j) {
          for (Eigen::Index i = std::max(ib, j + 1); i < iend; ++i) {
            m(i, j) = std::conj(m(j, i));
          }
        }
      }
    }
  }

  TridiagonalHamiltonian h_;
  int dim_;
  double gamma_rd_;
  std::vector<double> photons_;
  std::vector<double> up_;
  std::vector<double> down_;
  std::vector<double> row_decay_;
  std::vector<double> loss_;
  std::vector<double> dephase_even_;  ///< used for columns with |G>
  std::vector<double> dephase_odd_;   ///< used for columns with |X>
};

void check_stability(const SystemParams& params, double dt, const EvolveOptions& options) {
  if (options.enforce_stability_rule && dt * stability_scale(params) > 0.5) {
    throw StepUnstable("dt=" + std::to_string(dt) + " violates the stability rule (max dt " +
                       std::to_string(max_stable_dt(params)) + ")");
  }
}

std::string format_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

void guard_truncation(double top, double t, int levels, double tolerance) {
  if (top > tolerance) {
    throw TruncationOverflow("occupation " + format_sci(top) + " of the top " +
                             std::to_string(levels) + " photon levels at t=" + std::to_string(t) +
                             "; increase n_max");
  }
}

double band_energy(const TridiagonalHamiltonian& h, const CVector& psi) {
  double e = 0.0;
  const int dim = h.dim();
  for (int k = 0; k < dim; ++k) {
    e += h.diag[k] * std::norm(psi(k));
    if (k + 1 < dim) e += 2.0 * h.off[k] * (std::conj(psi(k)) * psi(k + 1)).real();
  }
  return e;
}

double band_energy(const TridiagonalHamiltonian& h, const CMatrix& rho) {
  double e = 0.0;
  const int dim = h.dim();
  for (int k = 0; k < dim; ++k) {
    e += h.diag[k] * rho(k, k).real();
    if (k + 1 < dim) e += 2.0 * h.off[k] * rho(k + 1, k).real();
  }
  return e;
}

std::vector<double> distribution_of(const CVector& psi) {
  std::vector<double> p(psi.size() / 2);
  for (std::size_t n = 0; n < p.size(); ++n) {
    p[n] = std::norm(psi(2 * n)) + std::norm(psi(2 * n + 1));
  }
  return p;
}

std::vector<double> distribution_of(const CMatrix& rho) {
  std::vector<double> p(rho.rows() / 2);
  for (std::size_t n = 0; n < p.size(); ++n) {
    p[n] = rho(2 * n, 2 * n).real() + rho(2 * n + 1, 2 * n + 1).real();
  }
  return p;
}

double excited_population(const CVector& psi) {
  double s = 0.0;
  for (Eigen::Index k = 1; k < psi.size(); k += 2) s += std::norm(psi(k));
  return s;
}

double excited_population(const CMatrix& rho) {
  double s = 0.0;
  for (Eigen::Index k = 1; k < rho.rows(); k += 2) s += rho(k, k).real();
  return s;
}

void record(Trajectory& traj, double t, const TridiagonalHamiltonian& h, const CVector& psi,
            const EvolveOptions& options) {
  const double norm = psi.squaredNorm();
  auto dist = distribution_of(psi);
  double mean = 0.0;
  for (std::size_t n = 0; n < dist.size(); ++n) mean += n * dist[n];
  traj.times.push_back(t);
  traj.mean_n.push_back(mean / norm);
  traj.norm.push_back(norm);
  traj.pop_excited.push_back(excited_population(psi) / norm);
  traj.energy.push_back(band_energy(h, psi) / norm);
  if (options.store_distributions) traj.distributions.push_back(std::move(dist));
  if (options.store_states) traj.pure_states.push_back(PureState{psi});
}

void record(Trajectory& traj, double t, const TridiagonalHamiltonian& h, const CMatrix& rho,
            const EvolveOptions& options) {
  const double tr = rho.trace().real();
  auto dist = distribution_of(rho);
  double mean = 0.0;
  for (std::size_t n = 0; n < dist.size(); ++n) mean += n * dist[n];
  traj.times.push_back(t);
  traj.mean_n.push_back(mean / tr);
  traj.norm.push_back(tr);
  traj.pop_excited.push_back(excited_population(rho) / tr);
  traj.energy.push_back(band_energy(h, rho) / tr);
  if (options.store_distributions) traj.distributions.push_back(std::move(dist));
  if (options.store_states) traj.density_states.push_back(DensityMatrix{rho});
}

double top_occupation_psi(const CVector& psi, int levels) {
  double s = 0.0;
  const Eigen::Index first = std::max<Eigen::Index>(0, psi.size() - 2 * levels);
  for (Eigen::Index k = first; k < psi.size(); ++k) s += std::norm(psi(k));
  return s;
}

double top_occupation_rho(const CMatrix& rho, int levels) {
  double s = 0.0;
  const Eigen::Index first = std::max<Eigen::Index>(0, rho.rows() - 2 * levels);
  for (Eigen::Index k = first; k < rho.rows(); ++k) s += rho(k, k).real();
  return s;
}

void symmetrize(CMatrix& rho) { rho = (0.5 * (rho + rho.adjoint())).eval(); }

}  // namespace

void TimeGrid::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt: must be > 0");
  if (!(t_final >= dt) || !std::isfinite(t_final)) throw ConfigError("t_final: must be >= dt");
  if (output_stride < 1) throw ConfigError("output_stride: must be >= 1");
}

long long TimeGrid::steps() const { return std::llround(t_final / dt); }

double stability_scale(const SystemParams& params) {
  const double n = params.n_max;
  const double rates = params.kappa + params.gamma_rd + params.gamma_pd;
  return 2.0 * params.f_drive + std::abs(params.delta) * n + std::abs(params.dxl) +
         2.0 * params.coupling * std::sqrt(n) + rates * n;
}

double max_stable_dt(const SystemParams& params) { return 0.5 / stability_scale(params); }

double top_level_occupation(const PureState& psi, int levels) {
  return top_occupation_psi(psi.amplitudes, levels);
}

double top_level_occupation(const DensityMatrix& rho, int levels) {
  return top_occupation_rho(rho.elements, levels);
}

Trajectory evolve_schrodinger(const SystemParams& params, const PureState& psi0,
                              const TimeGrid& grid, const EvolveOptions& options) {
  params.validate();
  grid.validate();
  if (psi0.amplitudes.size() != params.dim()) {
    throw ConfigError("initial state dimension does not match n_max");
  }
  check_stability(params, grid.dt, options);

  const TridiagonalHamiltonian h = hamiltonian_bands(params);
  CVector psi = psi0.amplitudes;
  const double norm0 = psi.squaredNorm();
  Rk4<CVector> rk4(psi);
  auto rhs = [&h](const CVector& y, CVector& out) { schrodinger_rhs(h, y, out); };

  Trajectory traj;
  const long long steps = grid.steps();
  record(traj, 0.0, h, psi, options);
  for (long long s = 1; s <= steps; ++s) {
    rk4.step(psi, grid.dt, rhs);
    const double t = s * grid.dt;
    if (options.check_truncation) {
      guard_truncation(top_occupation_psi(psi, options.guard_levels), t, options.guard_levels,
                       options.guard_tolerance);
    }
    const double norm = psi.squaredNorm();
    if (!std::isfinite(norm) || std::abs(norm - norm0) > options.norm_drift_tolerance) {
      throw StepUnstable("norm drifted to " + std::to_string(norm) + " at t=" + std::to_string(t));
    }
    if (s % grid.output_stride == 0 || s == steps) record(traj, t, h, psi, options);
  }
  return traj;
}

CMatrix lindblad_rhs(const SystemParams& params, const CMatrix& rho) {
  LindbladGenerator gen(params);
  CMatrix out(rho.rows(), rho.cols());
  gen(rho, out);
  return out;
}

Trajectory evolve_lindblad(const SystemParams& params, const DensityMatrix& rho0,
                           const TimeGrid& grid, const EvolveOptions& options) {
  params.validate();
  grid.validate();
  if (rho0.elements.rows() != params.dim() || rho0.elements.cols() != params.dim()) {
    throw ConfigError("initial density matrix dimension does not match n_max");
  }
  check_stability(params, grid.dt, options);

  const LindbladGenerator gen(params);
  CMatrix rho = rho0.elements;
  symmetrize(rho);
  const double trace0 = rho.trace().real();
  Rk4<CMatrix> rk4(rho);

  Trajectory traj;
  const long long steps = grid.steps();
  record(traj, 0.0, gen.bands(), rho, options);
  for (long long s = 1; s <= steps; ++s) {
    rk4.step(rho, grid.dt, gen);
    const double t = s * grid.dt;
    if (options.check_truncation) {
      guard_truncation(top_occupation_rho(rho, options.guard_levels), t, options.guard_levels,
                       options.guard_tolerance);
    }
    const double tr = rho.trace().real();
    if (!std::isfinite(tr) || std::abs(tr - trace0) > options.norm_drift_tolerance) {
      throw StepUnstable("trace drifted to " + std::to_string(tr) + " at t=" + std::to_string(t));
    }
    if (s % grid.output_stride == 0 || s == steps) {
      symmetrize(rho);
      record(traj, t, gen.bands(), rho, options);
    }
  }
  return traj;
}

StationaryState find_stationary(const SystemParams& params, const DensityMatrix& rho0, double dt,
                                const StationaryOptions& options) {
  params.validate();
  if (!params.dissipative()) {
    throw ConfigError("find_stationary: at least one of kappa, gamma_rd, gamma_pd must be > 0");
  }
  if (!(dt > 0.0)) throw ConfigError("dt: must be > 0");
  EvolveOptions evolve;
  check_stability(params, dt, evolve);

  double max_rate = 0.0;
  double min_rate = std::numeric_limits<double>::infinity();
  for (double r : {params.kappa, params.gamma_rd, params.gamma_pd}) {
    if (r > 0.0) {
      max_rate = std::max(max_rate, r);
      min_rate = std::min(min_rate, r);
    }
  }
  const long long window_steps = std::max<long long>(1, std::llround(1.0 / max_rate / dt));
  const double t_limit = options.time_limit_factor * 50.0 / min_rate;

  if (rho0.elements.rows() != params.dim() || rho0.elements.cols() != params.dim()) {
    throw ConfigError("initial density matrix dimension does not match n_max");
  }

  const LindbladGenerator gen(params);
  CMatrix rho = rho0.elements;
  bool seeded = false;
  if (options.seed_with_null_vector) {
    if (auto seed = solve_null_state(params)) {
      rho = std::move(seed->elements);
      seeded = true;
    }
  }
  symmetrize(rho);
  Rk4<CMatrix> rk4(rho);
  CMatrix previous = rho;
  double t = 0.0;
  long long step = 0;
  while (true) {
    for (long long s = 0; s < window_steps; ++s) {
      rk4.step(rho, dt, gen);
      ++step;
    }
    t = step * dt;
    symmetrize(rho);
    const double tr = rho.trace().real();
    if (!std::isfinite(tr) || std::abs(tr - 1.0) > 1e-4) {
      throw StepUnstable("trace drifted to " + std::to_string(tr) + " at t=" + std::to_string(t));
    }
    const double change = (rho - previous).cwiseAbs().sum();
    if (options.on_window) options.on_window(t, change);
    if (change < options.tolerance) {
      const double top = top_occupation_rho(rho, options.guard_levels);
      if (options.guard_truncation) {
        guard_truncation(top, t, options.guard_levels, options.guard_tolerance);
      }
      return StationaryState{DensityMatrix{rho}, t, change, seeded, top};
    }
    if (t >= t_limit) {
      throw NoConvergence("no stationary state within t=" + std::to_string(t_limit) +
                          " (last window change " + std::to_string(change) + ")");
    }
    previous = rho;
  }
}

}  // namespace cavity_packets
