#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "psoconv/angle.hpp"
#include "psoconv/params.hpp"

namespace psoconv {

struct SimConfig {
  std::size_t iterations = 1'000'000;
  std::uint64_t seed = 1;
  std::size_t histogram_bins = 1000;
  std::size_t batch_count = 100;
  // At least this share of the run is dropped before anything is recorded. The cut is
  // extended by fewer than batch_count steps so that the batches have equal size.
  double burn_in_fraction = 0.01;

  void validate() const;
};

struct SimStats {
  double mean_drift = 0.0;
  // Batch-means standard error of mean_drift.
  double standard_error = 0.0;
  // Bin densities over [-pi/2, pi/2]: count * bins / (pi * iterations_used).
  std::vector<double> histogram;
  std::size_t iterations_used = 0;
  // Draws with 1 + chi m - h = 0 exactly, thrown away and drawn again.
  std::size_t singular_redraws = 0;
};

// Two uniforms in [0, 1) per step from a 64-bit Mersenne twister: the top 53 bits of
// each output, scaled.
class StepRng {
public:
  explicit StepRng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
  std::mt19937_64 engine_;
};

// Angle recurrence started at alpha = 0; every step records Phi_{t+1} - Phi_t.
SimStats simulate_drift(const SwarmParams& params, const SimConfig& cfg);

// The per-step increments of the angle recurrence, without burn-in or batching.
std::vector<double> drift_increments(const SwarmParams& params, std::size_t steps,
                                     std::uint64_t seed);

// Same increments from x, v directly (x_0 = 1, v_0 = 0), rescaling both whenever
// ln(x^2 + v^2) leaves [-40, 40].
std::vector<double> simulate_xv_direct(const SwarmParams& params, std::size_t steps,
                                       std::uint64_t seed);

// Normalized histogram of angles in [-pi/2, pi/2].
std::vector<double> angle_histogram(std::span<const double> angles, std::size_t bins);

// L1 distance between the bin densities and the mean density of F on each bin, times
// the bin width. Lies in [0, 2].
double histogram_distance(std::span<const double> histogram, const AngleCdf& F);
double histogram_distance(const SimStats& stats, const AngleCdf& F);

}  // namespace psoconv
