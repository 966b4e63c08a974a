#include "reco/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace reco {

std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(const SeedSpec& seed) {
  std::uint64_t s = seed.master_seed;
  std::uint64_t h = splitmix64_next(s);
  h = splitmix64_next(s) ^ (seed.stream * 0xda942042e4dd58b5ULL);
  std::uint64_t s2 = h;
  return splitmix64_next(s2);
}

Rng::Rng(const SeedSpec& seed) {
  std::uint64_t s = derive_seed(seed);
  for (auto& w : state_) w = splitmix64_next(s);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = std::rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = std::rotl(state_[3], 45);
  return result;
}

double Rng::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

PointCloud sample_uniform_cloud(int n, int d, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_uniform_cloud: n must be >= 1");
  if (d < 1) throw std::invalid_argument("sample_uniform_cloud: d must be >= 1");
  PointCloud cloud;
  cloud.dim = d;
  cloud.coords.resize(static_cast<std::size_t>(n) * d);
  for (auto& c : cloud.coords) c = rng.next_unit();
  return cloud;
}

PointCloud sample_uniform_cloud(int n, int d, const SeedSpec& seed) {
  Rng rng(seed);
  return sample_uniform_cloud(n, d, rng);
}

double dist(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dist: dimension mismatch");
  double s2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double t = a[k] - b[k];
    s2 += t * t;
  }
  return std::sqrt(s2);
}

double pow_p(double r, double p) {
  if (p == 1.0) return r;
  if (p == 2.0) return r * r;
  const int ip = static_cast<int>(p);
  if (p == static_cast<double>(ip) && ip > 0 && ip <= 16) {
    double acc = 1.0;
    double base = r;
    int e = ip;
    while (e > 0) {
      if (e & 1) acc *= base;
      base *= base;
      e >>= 1;
    }
    return acc;
  }
  return std::pow(r, p);
}

double pdist(std::span<const double> a, std::span<const double> b, double p) {
  return pow_p(dist(a, b), p);
}

int ball_count(const PointCloud& cloud, const Ball& ball) {
  if (static_cast<int>(ball.center.size()) != cloud.dim)
    throw std::invalid_argument("ball_count: dimension mismatch");
  const double r2 = ball.radius * ball.radius;
  const int d = cloud.dim;
  int count = 0;
  const double* c = ball.center.data();
  for (int i = 0; i < cloud.size(); ++i) {
    const double* z = cloud.coords.data() + static_cast<std::size_t>(i) * d;
    double s2 = 0.0;
    for (int k = 0; k < d; ++k) {
      const double t = z[k] - c[k];
      s2 += t * t;
    }
    if (s2 <= r2) ++count;
  }
  return count;
}

DensityReport check_density_event(const PointCloud& cloud, const DensityConfig& cfg) {
  const int n = cloud.size();
  const int d = cloud.dim;
  if (n < 1) throw std::invalid_argument("check_density_event: empty cloud");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
    throw std::invalid_argument("check_density_event: alpha must lie in (0,1)");
  if (cfg.center_grid_per_axis < 1 || cfg.radius_levels < 1)
    throw std::invalid_argument("check_density_event: grid and levels must be positive");

  const double r0 = std::pow(static_cast<double>(n), -cfg.alpha / d);
  const double rcap = std::sqrt(static_cast<double>(d));
  const int m = cfg.center_grid_per_axis;

  DensityReport report;
  report.worst_ratio = std::numeric_limits<double>::infinity();
  DensityWitness worst;

  Ball ball;
  ball.center.assign(d, 0.0);
  std::vector<int> idx(d, 0);
  for (;;) {
    for (int k = 0; k < d; ++k) ball.center[k] = (idx[k] + 0.5) / m;
    double r = r0;
    for (int level = 0; level < cfg.radius_levels; ++level, r *= 2.0) {
      const double radius = std::min(r, rcap);
      ball.radius = radius;
      const int count = ball_count(cloud, ball);
      const double ratio = count / (n * pow_p(radius, static_cast<double>(d)));
      if (ratio < report.worst_ratio) {
        report.worst_ratio = ratio;
        worst = DensityWitness{ball.center, radius, count};
      }
      if (radius == rcap) break;
    }
    int k = 0;
    while (k < d && ++idx[k] == m) idx[k++] = 0;
    if (k == d) break;
  }
  report.event_holds = report.worst_ratio >= 0.5;
  if (!report.event_holds) report.witness = worst;
  return report;
}

DensityConfig default_density_config(int n, int d, double alpha) {
  DensityConfig cfg;
  cfg.alpha = alpha;
  const double r0 = std::pow(static_cast<double>(n), -alpha / d);
  int levels = 1;
  while (r0 * std::pow(2.0, levels) <= 0.5 && levels < 30) ++levels;
  cfg.radius_levels = levels;
  int m = static_cast<int>(std::ceil(1.0 / r0));
  cfg.center_grid_per_axis = std::clamp(m, 2, 16);
  return cfg;
}

}  // namespace reco
