#pragma once

#include "cavity_packets/observables.hpp"

#include <vector>

namespace cavity_packets {

struct Trajectory;

struct SpectralPeak {
  double freq = 0.0;  ///< angular frequency in units of g
  double height = 0.0;
};

struct Spectrum {
  std::vector<double> freqs;
  std::vector<double> magnitudes;
  std::vector<SpectralPeak> peaks;  ///< sorted by height, tallest first
};

struct SpectrumOptions {
  int zero_pad = 4;               ///< transform length multiple of the sample count
  double peak_fraction = 0.05;    ///< peaks must exceed this share of the global maximum
  int min_samples = 256;
};

/// Mean-subtracted, Hann-windowed, zero-padded magnitude DFT of a uniformly
/// sampled series. Throws NonuniformGrid for irregular time steps and
/// ConfigError for series shorter than min_samples.
Spectrum spectrum(const std::vector<double>& times, const std::vector<double>& values,
                  const SpectrumOptions& options = {});

/// Peaks that are not integer multiples (2, 3 or 4 within `tolerance` in
/// ratio) of a lower peak already accepted, in ascending frequency.
std::vector<SpectralPeak> fundamental_peaks(const Spectrum& s, double tolerance = 0.05);

struct PacketOptions {
  double valley_fraction = 0.1;  ///< a valley separates packets when below this share of both maxima
  double min_norm = 0.02;
  int smoothing = 3;             ///< moving-average width, odd
  /// Packet supports are trimmed to sites where P_n exceeds this share of
  /// the packet peak, so far tails do not stretch the support.
  double support_floor = 1e-6;
};

struct Packet {
  int n_lo = 0;
  int n_hi = 0;  ///< inclusive
  double norm = 0.0;
  double mean = 0.0;
  int peak = 0;
  int track_id = -1;  ///< set by track_packets
};

struct PacketSet {
  double time = 0.0;
  std::vector<Packet> packets;  ///< ascending in n
  double discarded = 0.0;       ///< mass outside the reported packets
};

PacketSet detect_packets(const PhotonDistribution& dist, const PacketOptions& options = {});

/// Moment-matched w * Poisson(mean) on the packet support.
struct PoissonFit {
  double norm = 0.0;
  double mean = 0.0;
  int n_lo = 0;
  std::vector<double> values;  ///< values[i] is the fit at n = n_lo + i
};

PoissonFit poisson_fit(const Packet& packet);

/// ||P - fit||_1 / w over the packet support.
double fit_residual(const Packet& packet, const PhotonDistribution& dist);

struct TrackOptions {
  PacketOptions packets;
  SpectrumOptions spectrum;
  double max_jump = 15.0;  ///< largest change of packet mean between strides
};

struct PacketTrack {
  int id = 0;
  std::vector<double> times;
  std::vector<double> means;
  std::vector<double> norms;
  std::vector<int> peaks;
  double amplitude = 0.0;  ///< half the peak-to-peak excursion of the mean
  double frequency = 0.0;  ///< tallest spectral peak of the mean, 0 when the track is too short
};

struct TrackResult {
  std::vector<PacketSet> snapshots;
  std::vector<PacketTrack> tracks;
};

/// Greedy nearest-mean association of packets between consecutive snapshots.
TrackResult track_packets(const std::vector<PhotonDistribution>& series,
                          const TrackOptions& options = {});
TrackResult track_packets(const Trajectory& traj, const TrackOptions& options = {});

}  // namespace cavity_packets
