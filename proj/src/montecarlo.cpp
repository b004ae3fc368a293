#include "psoconv/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "psoconv/error.hpp"
#include "psoconv/omega.hpp"

namespace psoconv {

namespace {

void check_params(const SwarmParams& params) {
  if (!params.finite()) throw Error(ErrorKind::NonFiniteInput, "parameters must be finite");
  if (params.deterministic())
    throw Error(ErrorKind::DegenerateCoefficients, "c_l = c_g = 0 has no random drift");
}

// One step of the angle recurrence. Returns the drift increment and advances alpha.
class AngleWalk {
public:
  AngleWalk(const SwarmParams& params, std::uint64_t seed) : p_(params), rng_(seed) {}

  double step() {
    const double m = std::tan(alpha_);
    double h = 0.0;
    double denom = 0.0;
    while (true) {
      const double r = rng_.uniform();
      const double s = rng_.uniform();
      h = p_.c_l * r + p_.c_g * s;
      denom = 1.0 + p_.chi * m - h;
      if (denom != 0.0) break;
      ++redraws_;
    }
    const double delta = g_integrand(alpha_, h, p_.chi);
    alpha_ = std::atan(1.0 - 1.0 / denom);
    return delta;
  }

  double alpha() const { return alpha_; }
  std::size_t redraws() const { return redraws_; }

private:
  SwarmParams p_;
  StepRng rng_;
  double alpha_ = 0.0;
  std::size_t redraws_ = 0;
};

std::size_t bin_of(double alpha, std::size_t bins) {
  const double u = (alpha + kHalfPi) / std::numbers::pi;
  const auto b = static_cast<std::size_t>(u * static_cast<double>(bins));
  return std::min(b, bins - 1);
}

}  // namespace

void SimConfig::validate() const {
  if (batch_count < 2) throw std::invalid_argument("batch_count must be >= 2");
  if (iterations < batch_count) throw std::invalid_argument("iterations must be >= batch_count");
  if (histogram_bins < 1) throw std::invalid_argument("histogram_bins must be >= 1");
  if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0))
    throw std::invalid_argument("burn_in_fraction must lie in [0, 1)");
}

SimStats simulate_drift(const SwarmParams& params, const SimConfig& cfg) {
  cfg.validate();
  check_params(params);

  const auto min_burn = static_cast<std::size_t>(
      std::ceil(cfg.burn_in_fraction * static_cast<double>(cfg.iterations)));
  const std::size_t batch_size = (cfg.iterations - std::min(min_burn, cfg.iterations)) / cfg.batch_count;
  if (batch_size == 0) throw std::invalid_argument("too few iterations after burn-in for the batches");
  const std::size_t used = batch_size * cfg.batch_count;
  const std::size_t burn = cfg.iterations - used;

  AngleWalk walk(params, cfg.seed);
  for (std::size_t t = 0; t < burn; ++t) walk.step();

  std::vector<std::size_t> counts(cfg.histogram_bins, 0);
  std::vector<double> batch_means(cfg.batch_count, 0.0);
  for (std::size_t b = 0; b < cfg.batch_count; ++b) {
    double sum = 0.0;
    for (std::size_t t = 0; t < batch_size; ++t) {
      ++counts[bin_of(walk.alpha(), cfg.histogram_bins)];
      sum += walk.step();
    }
    batch_means[b] = sum / static_cast<double>(batch_size);
  }

  SimStats stats;
  stats.iterations_used = used;
  stats.singular_redraws = walk.redraws();
  double mean = 0.0;
  for (double m : batch_means) mean += m;
  mean /= static_cast<double>(cfg.batch_count);
  double ss = 0.0;
  for (double m : batch_means) ss += (m - mean) * (m - mean);
  const auto nb = static_cast<double>(cfg.batch_count);
  stats.mean_drift = mean;
  stats.standard_error = std::sqrt(ss / (nb - 1.0) / nb);

  stats.histogram.resize(cfg.histogram_bins);
  const double scale = static_cast<double>(cfg.histogram_bins) / (std::numbers::pi * static_cast<double>(used));
  for (std::size_t i = 0; i < counts.size(); ++i)
    stats.histogram[i] = static_cast<double>(counts[i]) * scale;
  return stats;
}

std::vector<double> drift_increments(const SwarmParams& params, std::size_t steps,
                                     std::uint64_t seed) {
  check_params(params);
  AngleWalk walk(params, seed);
  std::vector<double> out(steps);
  for (double& d : out) d = walk.step();
  return out;
}

std::vector<double> simulate_xv_direct(const SwarmParams& params, std::size_t steps,
                                       std::uint64_t seed) {
  check_params(params);
  StepRng rng(seed);
  double x = 1.0;
  double v = 0.0;
  double phi = 0.0;  // ln(x^2 + v^2) of the rescaled pair
  std::vector<double> out(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    double nx = 0.0;
    double nv = 0.0;
    while (true) {
      const double r = rng.uniform();
      const double s = rng.uniform();
      const double h = params.c_l * r + params.c_g * s;
      nv = params.chi * v - h * x;
      nx = x + nv;
      if (nx != 0.0) break;
    }
    const double next_phi = std::log(nx * nx + nv * nv);
    out[t] = next_phi - phi;
    x = nx;
    v = nv;
    phi = next_phi;
    if (phi < -40.0 || phi > 40.0) {
      const double norm = std::sqrt(x * x + v * v);
      x /= norm;
      v /= norm;
      phi = std::log(x * x + v * v);
    }
  }
  return out;
}

std::vector<double> angle_histogram(std::span<const double> angles, std::size_t bins) {
  if (bins < 1) throw std::invalid_argument("bins must be >= 1");
  if (angles.empty()) throw std::invalid_argument("no angles to bin");
  std::vector<double> hist(bins, 0.0);
  for (double a : angles) {
    if (!(std::abs(a) <= kHalfPi)) throw Error(ErrorKind::OutOfDomain, "angle outside [-pi/2, pi/2]");
    hist[bin_of(a, bins)] += 1.0;
  }
  const double scale = static_cast<double>(bins) / (std::numbers::pi * static_cast<double>(angles.size()));
  for (double& h : hist) h *= scale;
  return hist;
}

double histogram_distance(std::span<const double> histogram, const AngleCdf& F) {
  if (histogram.empty()) throw std::invalid_argument("empty histogram");
  const std::size_t bins = histogram.size();
  const double width = std::numbers::pi / static_cast<double>(bins);
  double total = 0.0;
  double left = F(-kHalfPi);
  for (std::size_t i = 0; i < bins; ++i) {
    const double edge = i + 1 == bins ? kHalfPi : -kHalfPi + width * static_cast<double>(i + 1);
    const double right = F(edge);
    total += std::abs(histogram[i] - (right - left) / width) * width;
    left = right;
  }
  return total;
}

double histogram_distance(const SimStats& stats, const AngleCdf& F) {
  return histogram_distance(stats.histogram, F);
}

}  // namespace psoconv
