#include "cavity_packets/analysis.hpp"

#include "cavity_packets/dynamics.hpp"
#include "cavity_packets/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>

namespace cavity_packets {
namespace {

// FFTW's planner is not reentrant; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<double> magnitude_dft(std::vector<double> input) {
  const int n = static_cast<int>(input.size());
  std::vector<fftw_complex> out(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, input.data(), out.data(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  std::vector<double> mag(out.size());
  for (std::size_t k = 0; k < out.size(); ++k) mag[k] = std::hypot(out[k][0], out[k][1]);
  return mag;
}

void check_uniform(const std::vector<double>& times) {
  const double dt = times[1] - times[0];
  if (!(dt > 0.0)) throw NonuniformGrid("spectrum: times must increase");
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double step = times[i] - times[i - 1];
    if (std::abs(step - dt) > 1e-6 * dt) {
      throw NonuniformGrid("spectrum: time step at sample " + std::to_string(i) +
                           " differs from the first step");
    }
  }
}

}  // namespace

Spectrum spectrum(const std::vector<double>& times, const std::vector<double>& values,
                  const SpectrumOptions& options) {
  if (times.size() != values.size()) throw ConfigError("spectrum: times and values differ in length");
  const int samples = static_cast<int>(values.size());
  if (samples < std::max(options.min_samples, 2)) {
    throw ConfigError("spectrum: need at least " + std::to_string(options.min_samples) +
                      " samples, got " + std::to_string(samples));
  }
  check_uniform(times);
  const double dt = (times.back() - times.front()) / (samples - 1);

  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / samples;
  const int padded = samples * std::max(options.zero_pad, 1);
  std::vector<double> buffer(padded, 0.0);
  double scale = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / (samples - 1)));
    buffer[i] = w * (values[i] - mean);
    scale += std::abs(values[i]);
  }

  Spectrum out;
  out.magnitudes = magnitude_dft(std::move(buffer));
  out.freqs.resize(out.magnitudes.size());
  for (std::size_t k = 0; k < out.freqs.size(); ++k) {
    out.freqs[k] = 2.0 * std::numbers::pi * static_cast<double>(k) / (padded * dt);
  }

  const double top = *std::max_element(out.magnitudes.begin(), out.magnitudes.end());
  // A constant series leaves only roundoff after the mean is removed.
  if (top <= 1e-12 * scale) return out;
  const double floor = options.peak_fraction * top;
  const auto& m = out.magnitudes;
  for (std::size_t k = 1; k + 1 < m.size(); ++k) {
    if (m[k] > floor && m[k] > m[k - 1] && m[k] >= m[k + 1]) {
      out.peaks.push_back({out.freqs[k], m[k]});
    }
  }
  std::stable_sort(out.peaks.begin(), out.peaks.end(),
                   [](const SpectralPeak& a, const SpectralPeak& b) { return a.height > b.height; });
  return out;
}

std::vector<SpectralPeak> fundamental_peaks(const Spectrum& s, double tolerance) {
  std::vector<SpectralPeak> sorted = s.peaks;
  std::sort(sorted.begin(), sorted.end(),
            [](const SpectralPeak& a, const SpectralPeak& b) { return a.freq < b.freq; });
  std::vector<SpectralPeak> out;
  for (const SpectralPeak& p : sorted) {
    bool harmonic = false;
    for (const SpectralPeak& f : out) {
      const double ratio = p.freq / f.freq;
      for (int m = 2; m <= 4; ++m) harmonic = harmonic || std::abs(ratio - m) <= tolerance;
    }
    if (!harmonic) out.push_back(p);
  }
  return out;
}

namespace {

std::vector<double> moving_average(const std::vector<double>& p, int width) {
  const int n = static_cast<int>(p.size());
  const int half = std::max(width, 1) / 2;
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    double s = 0.0;
    for (int j = lo; j <= hi; ++j) s += p[j];
    out[i] = s / (hi - lo + 1);
  }
  return out;
}

// Maxima of s, plateaus counted once at their first index.
std::vector<int> local_maxima(const std::vector<double>& s) {
  const int n = static_cast<int>(s.size());
  std::vector<int> out;
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && s[j + 1] == s[i]) ++j;
    const bool left = i == 0 || s[i - 1] < s[i];
    const bool right = j == n - 1 || s[j + 1] < s[i];
    if (left && right && s[i] > 0.0) out.push_back(i);
    i = j + 1;
  }
  return out;
}

}  // namespace

PacketSet detect_packets(const PhotonDistribution& dist, const PacketOptions& options) {
  const std::vector<double>& p = dist.probs;
  PacketSet out;
  out.time = dist.time;
  const int n = static_cast<int>(p.size());
  if (n == 0) return out;
  const std::vector<double> s = moving_average(p, options.smoothing);

  // Regions are delimited by the deepest point between neighbouring maxima.
  struct Region {
    double top;
  };
  std::vector<Region> regions;
  std::vector<int> valleys;
  const std::vector<int> peaks = local_maxima(s);
  for (std::size_t r = 0; r < peaks.size(); ++r) {
    regions.push_back({s[peaks[r]]});
    if (r + 1 < peaks.size()) {
      const auto first = s.begin() + peaks[r];
      const auto last = s.begin() + peaks[r + 1] + 1;
      valleys.push_back(static_cast<int>(std::min_element(first, last) - s.begin()));
    }
  }

  // Merge across the shallowest valley until every valley is deep on both sides.
  while (!valleys.empty()) {
    std::size_t worst = 0;
    double worst_ratio = -1.0;
    for (std::size_t v = 0; v < valleys.size(); ++v) {
      const double shallow = std::min(regions[v].top, regions[v + 1].top);
      const double ratio = s[valleys[v]] / shallow;
      if (ratio > worst_ratio) {
        worst_ratio = ratio;
        worst = v;
      }
    }
    if (worst_ratio < options.valley_fraction) break;
    regions[worst].top = std::max(regions[worst].top, regions[worst + 1].top);
    regions.erase(regions.begin() + static_cast<std::ptrdiff_t>(worst) + 1);
    valleys.erase(valleys.begin() + static_cast<std::ptrdiff_t>(worst));
  }

  double kept = 0.0;
  for (std::size_t r = 0; r < regions.size(); ++r) {
    int lo = r == 0 ? 0 : valleys[r - 1];
    int hi = r + 1 == regions.size() ? n - 1 : valleys[r] - 1;
    const int peak = static_cast<int>(std::max_element(p.begin() + lo, p.begin() + hi + 1) - p.begin());
    const double floor = options.support_floor * p[peak];
    while (lo < peak && p[lo] <= floor) ++lo;
    while (hi > peak && p[hi] <= floor) --hi;

    Packet packet;
    packet.n_lo = lo;
    packet.n_hi = hi;
    packet.peak = peak;
    double moment = 0.0;
    for (int k = lo; k <= hi; ++k) {
      packet.norm += p[k];
      moment += k * p[k];
    }
    if (packet.norm < options.min_norm || packet.norm <= 0.0) continue;
    packet.mean = moment / packet.norm;
    kept += packet.norm;
    out.packets.push_back(packet);
  }
  out.discarded = dist.total() - kept;
  return out;
}

PoissonFit poisson_fit(const Packet& packet) {
  PoissonFit fit;
  fit.norm = packet.norm;
  fit.mean = packet.mean;
  fit.n_lo = packet.n_lo;
  fit.values.resize(static_cast<std::size_t>(packet.n_hi - packet.n_lo + 1));
  for (int k = packet.n_lo; k <= packet.n_hi; ++k) {
    double log_pois;
    if (packet.mean > 0.0) {
      log_pois = k * std::log(packet.mean) - packet.mean - std::lgamma(k + 1.0);
    } else {
      log_pois = k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    }
    fit.values[k - packet.n_lo] = packet.norm * std::exp(log_pois);
  }
  return fit;
}

double fit_residual(const Packet& packet, const PhotonDistribution& dist) {
  const PoissonFit fit = poisson_fit(packet);
  double r = 0.0;
  for (int k = packet.n_lo; k <= packet.n_hi; ++k) r += std::abs(dist.probs[k] - fit.values[k - fit.n_lo]);
  return r / packet.norm;
}

namespace {

void finish_track(PacketTrack& track, const SpectrumOptions& options) {
  const auto [lo, hi] = std::minmax_element(track.means.begin(), track.means.end());
  track.amplitude = 0.5 * (*hi - *lo);
  track.frequency = 0.0;
  if (static_cast<int>(track.means.size()) < options.min_samples) return;
  try {
    const Spectrum s = spectrum(track.times, track.means, options);
    if (!s.peaks.empty()) track.frequency = s.peaks.front().freq;
  } catch (const NonuniformGrid&) {
    // Tracks with gaps keep frequency 0.
  }
}

}  // namespace

TrackResult track_packets(const std::vector<PhotonDistribution>& series, const TrackOptions& options) {
  TrackResult result;
  std::vector<PacketTrack> finished;
  std::vector<PacketTrack> active;
  int next_id = 0;

  for (const PhotonDistribution& dist : series) {
    PacketSet set = detect_packets(dist, options.packets);
    struct Pair {
      double distance;
      std::size_t track;
      std::size_t packet;
    };
    std::vector<Pair> pairs;
    for (std::size_t t = 0; t < active.size(); ++t) {
      for (std::size_t k = 0; k < set.packets.size(); ++k) {
        const double d = std::abs(active[t].means.back() - set.packets[k].mean);
        if (d <= options.max_jump) pairs.push_back({d, t, k});
      }
    }
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const Pair& a, const Pair& b) { return a.distance < b.distance; });
    std::vector<int> track_of(set.packets.size(), -1);
    std::vector<bool> track_used(active.size(), false);
    for (const Pair& pr : pairs) {
      if (track_used[pr.track] || track_of[pr.packet] >= 0) continue;
      track_used[pr.track] = true;
      track_of[pr.packet] = static_cast<int>(pr.track);
    }

    std::vector<PacketTrack> still;
    for (std::size_t t = 0; t < active.size(); ++t) {
      if (track_used[t]) continue;
      finished.push_back(std::move(active[t]));
    }
    for (std::size_t t = 0; t < active.size(); ++t) {
      if (track_used[t]) still.push_back(std::move(active[t]));
    }
    // Map old indices to positions in `still`.
    std::vector<int> position(active.size(), -1);
    for (std::size_t t = 0, j = 0; t < active.size(); ++t) {
      if (track_used[t]) position[t] = static_cast<int>(j++);
    }
    for (std::size_t k = 0; k < set.packets.size(); ++k) {
      Packet& pk = set.packets[k];
      PacketTrack* track;
      if (track_of[k] >= 0) {
        track = &still[position[track_of[k]]];
      } else {
        still.push_back(PacketTrack{});
        track = &still.back();
        track->id = next_id++;
      }
      pk.track_id = track->id;
      track->times.push_back(set.time);
      track->means.push_back(pk.mean);
      track->norms.push_back(pk.norm);
      track->peaks.push_back(pk.peak);
    }
    active = std::move(still);
    result.snapshots.push_back(std::move(set));
  }
  for (PacketTrack& t : active) finished.push_back(std::move(t));
  for (PacketTrack& t : finished) finish_track(t, options.spectrum);
  std::sort(finished.begin(), finished.end(),
            [](const PacketTrack& a, const PacketTrack& b) { return a.id < b.id; });
  result.tracks = std::move(finished);
  return result;
}

TrackResult track_packets(const Trajectory& traj, const TrackOptions& options) {
  std::vector<PhotonDistribution> series;
  series.reserve(traj.distributions.size());
  for (std::size_t i = 0; i < traj.distributions.size(); ++i) {
    series.push_back(make_distribution(traj.distributions[i], traj.times[i]));
  }
  return track_packets(series, options);
}

}  // namespace cavity_packets
