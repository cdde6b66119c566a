#include "cavity_packets/dressed_analytics.hpp"
#include "cavity_packets/errors.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

using namespace cavity_packets;

namespace {

using ld = long double;

// First s = sqrt(n) > 0 where delta s^2 + sign s crosses target, by bisection.
ld crossing(ld delta, ld sign, ld target, ld s_hi) {
  const auto h = [&](ld s) { return delta * s * s + sign * s - target; };
  ld lo = 1e-12L, hi = s_hi;
  for (int i = 0; i < 200; ++i) {
    const ld mid = 0.5L * (lo + hi);
    ((h(lo) < 0) == (h(mid) < 0) ? lo : hi) = mid;
  }
  return 0.5L * (lo + hi);
}

// Upper edge of the oscillatory band |lambda - omega_n| <= f for the C- chain
// started at lambda = -f.
ld minus_upper(ld f, ld delta) {
  if (delta <= 0) return std::pow(crossing(delta, -1.0L, -2.0L * f, 10.0L * f), 2);
  const ld s_min = 1.0L / (2.0L * delta);  // minimum of delta s^2 - s
  const ld omega_min = delta * s_min * s_min - s_min;
  if (omega_min < -2.0L * f) return std::pow(crossing(delta, -1.0L, -2.0L * f, s_min), 2);
  return std::pow(crossing(delta, -1.0L, 0.0L, 10.0L / delta), 2);
}

ld plus_upper(ld f, ld delta) {
  if (delta >= 0) return std::pow(crossing(delta, 1.0L, 2.0L * f, 10.0L * f), 2);
  const ld s_max = -1.0L / (2.0L * delta);
  const ld omega_max = delta * s_max * s_max + s_max;
  if (omega_max > 2.0L * f) return std::pow(crossing(delta, 1.0L, 2.0L * f, s_max), 2);
  return std::pow(crossing(delta, 1.0L, 0.0L, -10.0L / delta), 2);
}

// Exact <a^dag a>(t) under the quadratic effective Hamiltonian, from a
// truncated Fock-space diagonalisation started in the vacuum.
double effective_mean(double f, double delta, double s, double t, int dim = 160) {
  const double theta = 0.25 * (1.0 / (2.0 * f + delta) + 1.0 / (2.0 * f - delta));
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 1; k < dim; ++k) a(k - 1, k) = std::sqrt(double(k));
  const Eigen::MatrixXd ad = a.transpose();
  const Eigen::MatrixXd d = a - ad;
  const Eigen::MatrixXd h = delta * ad * a + s * 0.5 * (a + ad) + s * 0.5 * theta * d * d;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  const Eigen::MatrixXd& v = es.eigenvectors();
  Eigen::VectorXcd c = v.row(0).transpose().cast<std::complex<double>>();
  for (int k = 0; k < dim; ++k) c(k) *= std::exp(std::complex<double>(0.0, -es.eigenvalues()(k) * t));
  const Eigen::VectorXcd psi = v.cast<std::complex<double>>() * c;
  double m = 0.0;
  for (int k = 0; k < dim; ++k) m += k * std::norm(psi(k));
  return m;
}

}  // namespace

TEST_SUITE("dressed_analytics") {

TEST_CASE("laser-dressed frequencies against an extended-precision evaluation") {
  for (auto [f, d] : {std::pair{10.0, 0.2}, {5.0, 0.3}, {5.0, -0.25}, {3.0, 1.0}}) {
    const ld th = 0.25L * (1.0L / (2.0L * f + d) + 1.0L / (2.0L * f - d));
    const LdsReport r = lds_report(f, d);
    CHECK(std::abs(r.theta - double(th)) < 1e-15);
    const ld rp = 1.0L - 2.0L * th / d;
    const ld rm = 1.0L + 2.0L * th / d;
    CHECK(r.omega_plus.imaginary == (rp < 0));
    CHECK(r.omega_minus.imaginary == (rm < 0));
    if (rp > 0) CHECK(std::abs(r.omega_plus.value - double(d * std::sqrt(rp))) < 1e-14);
    if (rm > 0) CHECK(std::abs(r.omega_minus.value - double(d * std::sqrt(rm))) < 1e-14);
    CHECK(r.amplitude == doctest::Approx(1.0 / (d * d)));
  }
}

TEST_CASE("reference values at f = 10, delta = 0.2") {
  const LdsReport r = lds_report(10.0, 0.2);
  CHECK(r.theta == doctest::Approx(0.0250025).epsilon(1e-6));
  CHECK(r.omega_plus.value == doctest::Approx(0.173202).epsilon(1e-5));
  CHECK(r.omega_minus.value == doctest::Approx(0.223609).epsilon(1e-5));
  CHECK(r.stable_plus);
  CHECK(r.validity_lds);
  CHECK(r.chi_plus == doctest::Approx(0.5 * std::asinh(r.theta / r.omega_plus.value)));
  CHECK(r.zeta_plus == doctest::Approx(std::exp(-r.chi_plus) / (2.0 * r.omega_plus.value)));
}

TEST_CASE("plus branch goes unstable for 2 theta > delta") {
  const LdsReport r = lds_report(5.0, 0.1);
  CHECK_FALSE(r.stable_plus);
  CHECK(r.stable_minus);
  CHECK(std::isnan(r.chi_plus));
  CHECK_THROWS_AS(lds_mean_photon(5.0, 0.1, Branch::Plus, 1.0), UnstableBranch);
  CHECK_THROWS_AS(lds_trajectory(5.0, 0.1, 1.0), UnstableBranch);
}

TEST_CASE("mirror symmetry of the branch frequencies") {
  for (double d : {0.3, 0.7, 1.3}) {
    const LdsReport a = lds_report(4.0, d);
    const LdsReport b = lds_report(4.0, -d);
    CHECK(std::abs(a.omega_plus.value) == doctest::Approx(std::abs(b.omega_minus.value)));
    CHECK(a.omega_plus.imaginary == b.omega_minus.imaginary);
  }
}

TEST_CASE("two-harmonic mean photon number") {
  const double f = 10.0, d = 0.2;
  const LdsReport r = lds_report(f, d);
  for (double t : {0.0, 5.0, 17.0, 33.0}) {
    for (auto [b, s, w] : {std::tuple{Branch::Plus, 1.0, r.omega_plus.value}, {Branch::Minus, -1.0, r.omega_minus.value}}) {
      const double expect = (1.0 - std::cos(w * t)) / (2.0 * d * d) +
                            r.theta / (2.0 * d * d) * (r.theta + s / (2.0 * w)) * (1.0 - std::cos(2.0 * w * t)) / 2.0;
      CHECK(lds_mean_photon(f, d, b, t) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  CHECK(lds_mean_photon(f, d, Branch::Plus, 0.0) == 0.0);
}

TEST_CASE("closed form tracks the exact effective dynamics") {
  // The closed form keeps two harmonics; the quadratic model itself is
  // solved exactly here. Agreement is at the few-percent level of 1/delta^2.
  const double f = 10.0, d = 0.2;
  for (auto [b, s] : {std::pair{Branch::Plus, 1.0}, {Branch::Minus, -1.0}}) {
    double worst = 0.0;
    for (double t = 0.0; t <= 40.0; t += 4.0) worst = std::max(worst, std::abs(effective_mean(f, d, s, t) - lds_mean_photon(f, d, b, t)));
    CHECK(worst < 0.06 / (d * d));
  }
}

TEST_CASE("phase-space trajectory") {
  const double f = 10.0, d = 0.2;
  const double w = lds_report(f, d).omega_plus.value;
  const auto z = lds_trajectory(f, d, M_PI / w);
  CHECK(z.real() == doctest::Approx(-2.0 / (std::sqrt(2.0) * d)));
  CHECK(std::abs(z.imag()) < 1e-12);
  CHECK(std::norm(z) / 2.0 == doctest::Approx(1.0 / (d * d)));
}

TEST_CASE("dephasing trail reaches four times the amplitude") {
  const double f = 10.0, d = 0.2;
  const double w = lds_report(f, d).omega_plus.value;
  CHECK(dephasing_trail_reach(f, d, M_PI / w) == doctest::Approx(4.0 / (d * d)).epsilon(0.1));
  // released at once the piece only reaches the undephased amplitude
  CHECK(dephasing_trail_reach(f, d, 0.0) == doctest::Approx(1.0 / (d * d)).epsilon(1e-3));
}

TEST_CASE("pole and bad drive") {
  CHECK_THROWS_AS(lds_report(1.0, 2.0), PoleAtTwoF);
  CHECK_THROWS_AS(lds_report(1.0, -2.0), PoleAtTwoF);
  CHECK_THROWS_AS(lds_report(0.0, 0.1), ConfigError);
  CHECK_THROWS_AS(cds_report(-1.0, 0.1), ConfigError);
}

TEST_CASE("turning points agree with the band edges of the chain frequencies") {
  for (double d : {-0.3, -0.05, -0.02, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5}) {
    const CdsReport c = cds_report(5.0, d);
    CHECK(c.n_minus_up == doctest::Approx(double(minus_upper(5.0L, d))).epsilon(1e-10));
    CHECK(c.n_plus_up == doctest::Approx(double(plus_upper(5.0L, d))).epsilon(1e-10));
  }
}

TEST_CASE("turning-point reference values") {
  const CdsReport a = cds_report(5.0, 0.1);
  CHECK(a.n_plus_up == doctest::Approx(38.1966).epsilon(1e-5));
  CHECK(a.n_minus_up == doctest::Approx(100.0));
  const CdsReport b = cds_report(5.0, 0.2);
  CHECK(b.n_tilde_lo == doctest::Approx(25.0));
  CHECK(b.n_tilde_hi == doctest::Approx(100.0));
  CHECK(b.split_flag);
  CHECK(cds_report(5.0, 0.0).n_minus_up == doctest::Approx(100.0));
  CHECK(cds_report(5.0, 0.0).n_plus_up == doctest::Approx(100.0));
  CHECK(cds_report(5.0, -0.05).n_minus_up == doctest::Approx(53.5898).epsilon(1e-5));
  CHECK(std::isinf(cds_report(5.0, -0.1).n_tilde_lo));
}

TEST_CASE("small-detuning expansion is stable") {
  // no cancellation as delta -> 0
  for (double d : {1e-6, 1e-9, -1e-9}) {
    CHECK(cds_report(5.0, d).n_plus_up == doctest::Approx(100.0).epsilon(1e-2));
    CHECK(cds_report(5.0, d).n_minus_up == doctest::Approx(100.0).epsilon(1e-2));
  }
}

TEST_CASE("stationary regimes") {
  CHECK(cds_report(5.0, 0.02).regime == StationaryRegime::SinglePacketLow);
  CHECK(cds_report(5.0, 0.05).regime == StationaryRegime::Bimodal);
  CHECK(cds_report(5.0, 0.05).in_bimodal_window);
  CHECK(cds_report(5.0, 0.1).regime == StationaryRegime::SinglePacketHigh);
  CHECK(cds_report(5.0, 0.02).stationary_low == doctest::Approx(25.0));
  CHECK(cds_report(5.0, 0.1).stationary_high == doctest::Approx(25.0));
  CHECK(std::string(to_string(StationaryRegime::Bimodal)) == "bimodal");
}

TEST_CASE("cavity-dressed frequencies") {
  CHECK(cds_frequency(0.1, 25, Branch::Plus) == doctest::Approx(7.5));
  CHECK(cds_frequency(0.1, 25, Branch::Minus) == doctest::Approx(-2.5));
}

}
