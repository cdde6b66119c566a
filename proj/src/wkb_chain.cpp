#include "cavity_packets/wkb_chain.hpp"

#include "cavity_packets/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cavity_packets {

void ChainSpec::validate() const {
  if (size() < 17) throw ConfigError("chain: need at least 17 sites (M >= 16)");
  if (!std::isfinite(xi)) throw ConfigError("chain: xi must be finite");
  for (double w : omegas) {
    if (!std::isfinite(w)) throw ConfigError("chain: omegas must be finite");
  }
}

ChainSpec ChainSpec::cavity_dressed(double f, double delta, Branch branch, int m) {
  ChainSpec spec;
  spec.omegas.resize(static_cast<std::size_t>(m) + 1);
  for (int n = 0; n <= m; ++n) spec.omegas[n] = cds_frequency(delta, n, branch);
  spec.xi = branch == Branch::Plus ? -f : f;
  return spec;
}

ChainModes chain_eigensolve(const ChainSpec& spec) {
  spec.validate();
  const int n = spec.size();
  Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(spec.omegas.data(), n);
  Eigen::VectorXd off = Eigen::VectorXd::Constant(n - 1, 0.5 * spec.xi);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NoConvergence("chain eigensolver did not converge");
  return ChainModes{solver.eigenvalues(), solver.eigenvectors()};
}

RegionMap classify_region(const ChainSpec& spec, double lambda) {
  RegionMap map;
  map.lambda = lambda;
  const double reach = std::abs(spec.xi);
  map.sites.reserve(spec.omegas.size());
  for (double w : spec.omegas) {
    map.sites.push_back(std::abs(lambda - w) <= reach ? SiteKind::Oscillatory : SiteKind::Evanescent);
  }
  const int n = static_cast<int>(map.sites.size());
  for (int i = 1; i < n; ++i) {
    if (map.sites[i] != map.sites[i - 1]) map.turning_points.push_back(i);
  }
  for (int i = 0; i < n;) {
    if (map.sites[i] != SiteKind::Oscillatory) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < n && map.sites[j + 1] == SiteKind::Oscillatory) ++j;
    map.oscillatory.push_back({i, j});
    i = j + 1;
  }
  return map;
}

double confined_fraction(const ChainModes& modes, const ChainSpec& spec, int k, int margin) {
  const RegionMap map = classify_region(spec, modes.eigenvalues(k));
  const int n = spec.size();
  std::vector<bool> inside(n, false);
  for (const SiteRange& r : map.oscillatory) {
    for (int i = std::max(0, r.lo - margin); i <= std::min(n - 1, r.hi + margin); ++i) inside[i] = true;
  }
  double total = 0.0;
  double in = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = modes.eigenvectors(i, k) * modes.eigenvectors(i, k);
    total += w;
    if (inside[i]) in += w;
  }
  return total > 0.0 ? in / total : 0.0;
}

bool DecayReport::all_monotone() const {
  return std::all_of(sides.begin(), sides.end(), [](const DecaySide& s) { return s.monotone; });
}

bool DecayReport::all_decaying() const {
  return std::all_of(sides.begin(), sides.end(), [](const DecaySide& s) { return s.slope < 0.0; });
}

namespace {

DecaySide fit_side(const Eigen::VectorXd& c, int mode, double lambda, int edge, int direction,
                   int available, int fit_sites) {
  DecaySide side;
  side.mode = mode;
  side.lambda = lambda;
  side.turning_point = edge;
  side.direction = direction;
  side.sites = std::min(available, fit_sites);
  // Fit over the oscillatory edge site plus the evanescent sites beyond it.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  bool monotone = true;
  double previous = std::abs(c(edge));
  const double tiny = std::numeric_limits<double>::min();
  for (int s = 0; s <= side.sites; ++s) {
    const double a = std::abs(c(edge + direction * s));
    const double y = std::log(std::max(a, tiny));
    sx += s;
    sy += y;
    sxx += static_cast<double>(s) * s;
    sxy += s * y;
    if (s > 0) {
      monotone = monotone && a < previous;
      previous = a;
    }
  }
  const double count = side.sites + 1.0;
  const double denom = count * sxx - sx * sx;
  side.slope = denom > 0.0 ? (count * sxy - sx * sy) / denom : 0.0;
  side.monotone = monotone;
  return side;
}

}  // namespace

DecayReport decay_verification(const ChainModes& modes, const ChainSpec& spec, double lambda_lo,
                               double lambda_hi, int fit_sites) {
  DecayReport report;
  const int n = spec.size();
  for (int k = 0; k < modes.eigenvalues.size(); ++k) {
    const double lambda = modes.eigenvalues(k);
    if (lambda < lambda_lo || lambda > lambda_hi) continue;
    const RegionMap map = classify_region(spec, lambda);
    const Eigen::VectorXd c = modes.eigenvectors.col(k);
    // Isolated oscillatory sites carrying no weight (site 0 of the cavity
    // chains sits at omega = 0) would be read as growth; only the range
    // holding most of the mode is examined.
    const SiteRange* main = nullptr;
    double best = -1.0;
    for (const SiteRange& r : map.oscillatory) {
      const double w = c.segment(r.lo, r.hi - r.lo + 1).squaredNorm();
      if (w > best) {
        best = w;
        main = &r;
      }
    }
    if (main != nullptr) {
      const SiteRange& r = *main;
      if (r.hi < n - 1) {
        int available = 0;
        while (r.hi + available + 1 < n && map.sites[r.hi + available + 1] == SiteKind::Evanescent) ++available;
        report.sides.push_back(fit_side(c, k, lambda, r.hi, +1, available, fit_sites));
      }
      if (r.lo > 0) {
        int available = 0;
        while (r.lo - available - 1 >= 0 && map.sites[r.lo - available - 1] == SiteKind::Evanescent) ++available;
        report.sides.push_back(fit_side(c, k, lambda, r.lo, -1, available, fit_sites));
      }
    }
  }
  return report;
}

double boundary_drift(double f, double delta, Branch branch, int m, double lambda_lo,
                      double lambda_hi) {
  const ChainModes shorter = chain_eigensolve(ChainSpec::cavity_dressed(f, delta, branch, m));
  const ChainModes longer = chain_eigensolve(ChainSpec::cavity_dressed(f, delta, branch, 2 * m));
  const Eigen::VectorXd& ref = longer.eigenvalues;
  double drift = 0.0;
  for (int k = 0; k < shorter.eigenvalues.size(); ++k) {
    const double lambda = shorter.eigenvalues(k);
    if (lambda < lambda_lo || lambda > lambda_hi) continue;
    const double* begin = ref.data();
    const double* end = ref.data() + ref.size();
    const double* it = std::lower_bound(begin, end, lambda);
    double best = std::numeric_limits<double>::infinity();
    if (it != end) best = std::min(best, std::abs(*it - lambda));
    if (it != begin) best = std::min(best, std::abs(*(it - 1) - lambda));
    drift = std::max(drift, best);
  }
  return drift;
}

}  // namespace cavity_packets
