#include "oracles.hpp"

#include "cavity_packets/core_model.hpp"
#include "cavity_packets/errors.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

using namespace cavity_packets;

TEST_SUITE("core_model") {

TEST_CASE("flat index round trip") {
  for (int k = 0; k < 400; ++k) CHECK(flatten(unflatten(k)) == k);
  CHECK(flatten(Tls::X, 3) == 7);
  CHECK(unflatten(6) == HilbertIndex{Tls::G, 3});
}

TEST_CASE("dense hamiltonian agrees with an independent construction") {
  for (auto [f, d, x] : {std::tuple{5.0, 0.1, 0.0}, {0.0, 0.0, 0.0}, {2.5, -0.3, 0.7}}) {
    const SystemParams p{f, d, x, 0.0, 0.0, 0.0, 12};
    const auto ref = oracle::dense_ops(f, d, x, 12);
    const OperatorSet ops = build_operators(p);
    CHECK((ops.hamiltonian - ref.h).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((ops.a_op - ref.a).cwiseAbs().maxCoeff() == 0.0);
    CHECK((ops.sigma3 - ref.sz).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("band form reproduces the dense matrix") {
  const SystemParams p{3.0, 0.25, -0.4, 0.0, 0.0, 0.0, 20};
  const TridiagonalHamiltonian h = hamiltonian_bands(p);
  const CMatrix dense = build_operators(p).hamiltonian;
  CMatrix rebuilt = CMatrix::Zero(p.dim(), p.dim());
  for (int k = 0; k < h.dim(); ++k) {
    rebuilt(k, k) = h.diag[k];
    if (k + 1 < h.dim()) rebuilt(k, k + 1) = rebuilt(k + 1, k) = h.off[k];
  }
  CHECK((rebuilt - dense).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("matrix elements read off directly") {
  const OperatorSet ops = build_operators(SystemParams{5.0, 0.1, 0.0, 0.0, 0.0, 0.0, 10});
  CHECK(ops.hamiltonian(flatten(Tls::G, 0), flatten(Tls::X, 0)).real() == doctest::Approx(-5.0));
  CHECK(ops.hamiltonian(flatten(Tls::G, 1), flatten(Tls::G, 1)).real() == doctest::Approx(0.1));
  CHECK((ops.hamiltonian - ops.hamiltonian.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  for (int n = 0; n < 10; ++n) {
    CHECK(ops.a_dag(flatten(Tls::G, n + 1), flatten(Tls::G, n)).real() == std::sqrt(n + 1.0));
  }
}

TEST_CASE("undriven ladder has eigenvalues +-sqrt(n)") {
  const OperatorSet ops = build_operators(SystemParams{0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 9});
  Eigen::SelfAdjointEigenSolver<CMatrix> es(ops.hamiltonian);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::vector<double> expect{0.0};
  for (int n = 1; n <= 9; ++n) {
    expect.push_back(std::sqrt(double(n)));
    expect.push_back(-std::sqrt(double(n)));
  }
  // |X, n_max> has no partner below the cutoff
  expect.push_back(0.0);
  std::sort(expect.begin(), expect.end());
  REQUIRE(ev.size() == expect.size());
  for (std::size_t i = 0; i < ev.size(); ++i) CHECK(ev[i] == doctest::Approx(expect[i]).epsilon(1e-12));
}

TEST_CASE("sign of the drive is a gauge choice") {
  // sigma3 times photon parity maps f to -f; the library rejects f < 0, so
  // the mirrored Hamiltonian comes from the oracle.
  const CMatrix h = build_operators(SystemParams{2.0, 0.13, 0.0, 0.0, 0.0, 0.0, 20}).hamiltonian;
  const CMatrix mirrored = oracle::dense_ops(-2.0, 0.13, 0.0, 20).h;
  const auto ev = [](const CMatrix& m) {
    return Eigen::SelfAdjointEigenSolver<CMatrix>(m, Eigen::EigenvaluesOnly).eigenvalues().eval();
  };
  CHECK((ev(h) - ev(mirrored)).norm() < 1e-10);
}

TEST_CASE("prepared states") {
  const PureState g = prepare_state(InitialState::parse("ground"), 10);
  CHECK(g.amplitudes(0) == Complex(1.0));
  CHECK(g.norm() == doctest::Approx(1.0));
  const PureState plus = prepare_state(InitialState::parse("plus"), 10);
  CHECK(plus.amplitude(Tls::G, 0).real() == doctest::Approx(M_SQRT1_2));
  CHECK(plus.amplitude(Tls::X, 0).real() == doctest::Approx(M_SQRT1_2));
  const PureState minus = prepare_state(InitialState::parse("minus"), 10);
  CHECK(minus.amplitude(Tls::X, 0).real() == doctest::Approx(-M_SQRT1_2));
  CHECK(prepare_state(InitialState::parse("fock:3"), 10).amplitude(Tls::G, 3) == Complex(1.0));
  CHECK(prepare_state(InitialState::parse("excited_fock:2"), 10).amplitude(Tls::X, 2) == Complex(1.0));
  CHECK_THROWS_AS(prepare_state(InitialState::parse("fock:11"), 10), TruncationError);
  CHECK_THROWS_AS(InitialState::parse("squeezed"), ConfigError);
  CHECK(InitialState::parse(InitialState::parse("excited_fock:4").to_string()).n == 4);
}

TEST_CASE("density matrices of pure states") {
  const DensityMatrix rho = to_density(prepare_state(InitialState::parse("plus"), 10));
  CHECK(rho.trace().real() == doctest::Approx(1.0));
  CHECK(rho.purity() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rho.elements(0, 1).real() == doctest::Approx(0.5));
  CHECK(rho.elements(1, 0).real() == doctest::Approx(0.5));
  CHECK(rho.elements.cwiseAbs().sum() == doctest::Approx(2.0));
  CHECK(min_eigenvalue(rho) > -1e-12);
}

TEST_CASE("coherent state amplitudes are Poissonian") {
  const Complex alpha(1.5, -0.5);
  const PureState psi = coherent_state(alpha, 60);
  const double n_bar = std::norm(alpha);
  for (int n = 0; n < 12; ++n) {
    const double p = std::exp(-n_bar + n * std::log(n_bar) - std::lgamma(n + 1.0));
    CHECK(std::norm(psi.amplitude(Tls::G, n)) == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("validation names the field") {
  SystemParams p;
  p.kappa = -1.0;
  try {
    p.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("kappa") != std::string::npos);
  }
  p = SystemParams{};
  p.n_max = 3;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

}
