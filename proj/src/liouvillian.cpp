#include "cavity_packets/dynamics.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <vector>

namespace cavity_packets {

Eigen::SparseMatrix<Complex> liouvillian_matrix(const SystemParams& params) {
  params.validate();
  const TridiagonalHamiltonian h = hamiltonian_bands(params);
  const int d = params.dim();
  const auto idx = [d](int i, int j) { return static_cast<Eigen::Index>(j) * d + i; };
  const Complex minus_i{0.0, -1.0};

  std::vector<double> photons(d);
  std::vector<double> excited(d);
  for (int k = 0; k < d; ++k) {
    photons[k] = unflatten(k).n;
    excited[k] = unflatten(k).tls == Tls::X ? 1.0 : 0.0;
  }

  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(static_cast<std::size_t>(d) * d * 8);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) {
      const Eigen::Index row = idx(i, j);
      const double decay = -0.5 * params.kappa * (photons[i] + photons[j]) -
                           0.5 * params.gamma_rd * (excited[i] + excited[j]) -
                           (excited[i] != excited[j] ? params.gamma_pd : 0.0);
      triplets.emplace_back(row, row, minus_i * (h.diag[i] - h.diag[j]) + decay);
      if (i > 0) triplets.emplace_back(row, idx(i - 1, j), minus_i * h.off[i - 1]);
      if (i + 1 < d) triplets.emplace_back(row, idx(i + 1, j), minus_i * h.off[i]);
      if (j > 0) triplets.emplace_back(row, idx(i, j - 1), -minus_i * h.off[j - 1]);
      if (j + 1 < d) triplets.emplace_back(row, idx(i, j + 1), -minus_i * h.off[j]);
      if (params.kappa > 0.0 && i + 2 < d && j + 2 < d) {
        const double w = params.kappa * std::sqrt((photons[i] + 1.0) * (photons[j] + 1.0));
        triplets.emplace_back(row, idx(i + 2, j + 2), w);
      }
      if (params.gamma_rd > 0.0 && excited[i] == 0.0 && excited[j] == 0.0) {
        triplets.emplace_back(row, idx(i + 1, j + 1), params.gamma_rd);
      }
    }
  }
  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
  Eigen::SparseMatrix<Complex> l(n, n);
  l.setFromTriplets(triplets.begin(), triplets.end());
  l.makeCompressed();
  return l;
}

std::optional<DensityMatrix> solve_null_state(const SystemParams& params) {
  const int d = params.dim();
  Eigen::SparseMatrix<Complex, Eigen::RowMajor> system = liouvillian_matrix(params);
  // Trace preservation makes the rows linearly dependent; replace the
  // equation for rho_00 with Tr rho = 1.
  for (Eigen::SparseMatrix<Complex, Eigen::RowMajor>::InnerIterator it(system, 0); it; ++it) {
    it.valueRef() = 0.0;
  }
  std::vector<Eigen::Triplet<Complex>> trace_row;
  for (int k = 0; k < d; ++k) trace_row.emplace_back(0, static_cast<Eigen::Index>(k) * d + k, 1.0);
  Eigen::SparseMatrix<Complex, Eigen::RowMajor> trace(system.rows(), system.cols());
  trace.setFromTriplets(trace_row.begin(), trace_row.end());
  Eigen::SparseMatrix<Complex> a = system + trace;
  a.prune(Complex(0.0));
  a.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<Complex>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) return std::nullopt;
  CVector rhs = CVector::Zero(a.rows());
  rhs(0) = 1.0;
  const CVector x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) return std::nullopt;

  DensityMatrix rho{Eigen::Map<const CMatrix>(x.data(), d, d)};
  rho.elements = (0.5 * (rho.elements + rho.elements.adjoint())).eval();
  if (std::abs(rho.trace() - 1.0) > 1e-8) return std::nullopt;
  if (min_eigenvalue(rho) < -1e-6) return std::nullopt;
  return rho;
}

}  // namespace cavity_packets
