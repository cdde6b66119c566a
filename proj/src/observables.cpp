#include "cavity_packets/observables.hpp"

#include "cavity_packets/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace cavity_packets {
namespace {

constexpr double kClampFloor = -1e-12;
constexpr double kSupportThreshold = 1e-8;

std::vector<double> clamp_probs(std::vector<double> probs) {
  for (std::size_t n = 0; n < probs.size(); ++n) {
    if (probs[n] >= 0.0) continue;
    if (probs[n] < kClampFloor) {
      std::ostringstream msg;
      msg << "P_" << n << " = " << probs[n] << " is negative beyond roundoff";
      throw PositivityViolation(msg.str());
    }
    probs[n] = 0.0;
  }
  return probs;
}

}  // namespace

double PhotonDistribution::total() const {
  double s = 0.0;
  for (double p : probs) s += p;
  return s;
}

double PhotonDistribution::mean() const {
  double s = 0.0;
  for (std::size_t n = 0; n < probs.size(); ++n) s += static_cast<double>(n) * probs[n];
  return s;
}

PhotonDistribution make_distribution(std::vector<double> probs, double time) {
  return PhotonDistribution{clamp_probs(std::move(probs)), time};
}

PhotonDistribution photon_distribution(const PureState& psi, double time) {
  const int levels = psi.n_max() + 1;
  std::vector<double> probs(levels);
  for (int n = 0; n < levels; ++n) {
    probs[n] = std::norm(psi.amplitude(Tls::G, n)) + std::norm(psi.amplitude(Tls::X, n));
  }
  return make_distribution(std::move(probs), time);
}

PhotonDistribution photon_distribution(const DensityMatrix& rho, double time) {
  const int levels = rho.n_max() + 1;
  std::vector<double> probs(levels);
  for (int n = 0; n < levels; ++n) {
    const int g = flatten(Tls::G, n);
    const int x = flatten(Tls::X, n);
    probs[n] = rho.elements(g, g).real() + rho.elements(x, x).real();
  }
  return make_distribution(std::move(probs), time);
}

double mean_photon_number(const PureState& psi) { return photon_distribution(psi).mean(); }
double mean_photon_number(const DensityMatrix& rho) { return photon_distribution(rho).mean(); }
double mean_photon_number(const PhotonDistribution& dist) { return dist.mean(); }

CMatrix reduce_photonic(const DensityMatrix& rho) {
  const int levels = rho.n_max() + 1;
  CMatrix out(levels, levels);
  for (int m = 0; m < levels; ++m) {
    for (int n = 0; n < levels; ++n) {
      out(m, n) = rho.elements(flatten(Tls::G, m), flatten(Tls::G, n)) +
                  rho.elements(flatten(Tls::X, m), flatten(Tls::X, n));
    }
  }
  return out;
}

void GridSpec::validate() const {
  if (!(re_max > re_min)) throw ConfigError("wigner grid: re_max must exceed re_min");
  if (!(im_max > im_min)) throw ConfigError("wigner grid: im_max must exceed im_min");
  if (re_points < 2) throw ConfigError("wigner grid: re_points must be at least 2");
  if (im_points < 2) throw ConfigError("wigner grid: im_points must be at least 2");
}

double GridSpec::re_step() const { return (re_max - re_min) / (re_points - 1); }
double GridSpec::im_step() const { return (im_max - im_min) / (im_points - 1); }

double GridSpec::max_abs() const {
  const double re = std::max(std::abs(re_min), std::abs(re_max));
  const double im = std::max(std::abs(im_min), std::abs(im_max));
  return std::hypot(re, im);
}

double WignerGrid::integral() const {
  if (re_axis.size() < 2 || im_axis.size() < 2) return 0.0;
  const double da = (re_axis[1] - re_axis[0]) * (im_axis[1] - im_axis[0]);
  return values.sum() * da;
}

double WignerGrid::min() const { return values.minCoeff(); }
double WignerGrid::max() const { return values.maxCoeff(); }

namespace {

// Displaced-parity sum. For m = n + k the element of D(z) P D(z)^dagger is
// (-1)^n e^{ik theta} phi_n^{(k)}(x), x = 4|z|^2, where
//   phi_n^{(k)} = sqrt(n!/(n+k)!) x^{k/2} e^{-x/2} L_n^{(k)}(x)
// obeys a normalised three-term recurrence in n. Its x-independent
// coefficients are tabulated once per state. The recurrence runs on a
// rescaled copy so the e^{-x/2} prefactor cannot underflow.
class WignerKernel {
 public:
  explicit WignerKernel(const CMatrix& rho) : levels_(static_cast<int>(rho.rows())) {
    const CMatrix h = 0.5 * (rho + rho.adjoint());
    bands_.resize(levels_);
    for (int k = 0; k < levels_; ++k) {
      Band& b = bands_[k];
      const int len = levels_ - k;
      b.re.resize(len);
      b.im.resize(len);
      b.a.resize(len);
      b.c.resize(len);
      b.d.resize(len);
      const double mult = k == 0 ? 1.0 : 2.0;
      for (int n = 0; n < len; ++n) {
        const double sign = n % 2 == 0 ? mult : -mult;
        b.re[n] = sign * h(n, n + k).real();
        b.im[n] = sign * h(n, n + k).imag();
        b.active = b.active || b.re[n] != 0.0 || b.im[n] != 0.0;
        const double inv = 1.0 / std::sqrt((n + 1.0) * (n + 1.0 + k));
        b.a[n] = inv;
        b.c[n] = (2.0 * n + 1.0 + k) * inv;
        b.d[n] = std::sqrt(static_cast<double>(n) * (n + k)) * inv;
      }
      b.log_factorial = std::lgamma(k + 1.0);
    }
  }

  double operator()(Complex z) const {
    constexpr double kBig = 1e150;
    const double log_big = std::log(kBig);
    const double r2 = std::norm(z);
    const double x = 4.0 * r2;
    const Complex unit = r2 > 0.0 ? z / std::sqrt(r2) : Complex(1.0, 0.0);
    const double log_x = x > 0.0 ? std::log(x) : 0.0;

    double total = 0.0;
    Complex phase{1.0, 0.0};
    for (int k = 0; k < levels_; ++k, phase *= unit) {
      if (k > 0 && x == 0.0) break;
      const Band& b = bands_[k];
      if (!b.active) continue;
      double log_scale = 0.5 * k * log_x - 0.5 * x - 0.5 * b.log_factorial;
      double scale = std::exp(log_scale);
      const double pr = phase.real();
      const double pi = phase.imag();
      double prev = 0.0;
      double cur = 1.0;
      double acc = 0.0;
      const int len = levels_ - k;
      for (int n = 0; n < len; ++n) {
        acc += (b.re[n] * pr - b.im[n] * pi) * cur * scale;
        const double next = (b.c[n] - x * b.a[n]) * cur - b.d[n] * prev;
        prev = cur;
        cur = next;
        if (std::abs(cur) > kBig) {
          cur /= kBig;
          prev /= kBig;
          log_scale += log_big;
          scale = std::exp(log_scale);
        }
      }
      total += acc;
    }
    return 2.0 / std::numbers::pi * total;
  }

 private:
  struct Band {
    std::vector<double> re, im;  // signed, doubled Hermitian-part band k
    std::vector<double> a, c, d;  // recurrence coefficients
    double log_factorial = 0.0;
    bool active = false;
  };
  int levels_;
  std::vector<Band> bands_;
};

}  // namespace

double wigner_at(const CMatrix& rho_phot, Complex z) {
  return WignerKernel(rho_phot)(z);
}

WignerGrid wigner(const CMatrix& rho_phot, const GridSpec& grid) {
  grid.validate();
  const int levels = static_cast<int>(rho_phot.rows());
  const double reach = grid.max_abs();
  for (int n = levels - 1; n >= 0; --n) {
    if (rho_phot(n, n).real() <= kSupportThreshold) continue;
    if (n >= 0.5 * reach * reach) {
      std::ostringstream msg;
      msg << "wigner grid reaches |z| = " << reach << " but photon level " << n
          << " holds " << rho_phot(n, n).real() << "; need n < |z|^2/2";
      throw GridTooSmall(msg.str());
    }
    break;
  }

  const WignerKernel kernel(rho_phot);
  WignerGrid out;
  out.re_axis.resize(grid.re_points);
  out.im_axis.resize(grid.im_points);
  for (int i = 0; i < grid.re_points; ++i) out.re_axis[i] = grid.re_min + i * grid.re_step();
  for (int j = 0; j < grid.im_points; ++j) out.im_axis[j] = grid.im_min + j * grid.im_step();
  out.values.resize(grid.re_points, grid.im_points);
  for (int j = 0; j < grid.im_points; ++j) {
    for (int i = 0; i < grid.re_points; ++i) {
      out.values(i, j) = kernel(Complex(out.re_axis[i], out.im_axis[j]));
    }
  }
  return out;
}

}  // namespace cavity_packets
