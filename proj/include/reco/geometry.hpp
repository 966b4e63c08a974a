// geometry.hpp - point clouds on the unit cube, seeded sampling, p-power
// distances, ball occupancy counts and the mesoscopic density event.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace reco {

// Replicate-addressable seed. Identical (master_seed, stream) pairs yield
// bit-identical sample sequences on every platform.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream = 0;
};

// One round of the splitmix64 mixer.
std::uint64_t splitmix64_next(std::uint64_t& state);

// Derived 64-bit seed for a (master_seed, stream) pair: two splitmix64
// rounds over master_seed, xor-folded with the stream index and mixed once
// more. Used both to key the generator and as seed provenance in records.
std::uint64_t derive_seed(const SeedSpec& seed);

// xoshiro256++ with splitmix64 state expansion. Explicit and portable: the
// platform engines are never used, so sequences are identical across
// compilers and machines.
class Rng {
 public:
  explicit Rng(const SeedSpec& seed);

  std::uint64_t next_u64();
  // Uniform on [0,1), 53 random bits.
  double next_unit();

 private:
  std::array<std::uint64_t, 4> state_;
};

// n points in [0,1]^d, stored row-major.
struct PointCloud {
  int dim = 0;
  std::vector<double> coords;

  int size() const { return dim > 0 ? static_cast<int>(coords.size()) / dim : 0; }
  std::span<const double> point(int i) const {
    return {coords.data() + static_cast<std::size_t>(i) * dim,
            static_cast<std::size_t>(dim)};
  }
};

// Draws n*d coordinates from rng, in point-major order.
PointCloud sample_uniform_cloud(int n, int d, Rng& rng);
PointCloud sample_uniform_cloud(int n, int d, const SeedSpec& seed);

// Euclidean distance between two points of equal dimension.
double dist(std::span<const double> a, std::span<const double> b);

// r^p for r >= 0. Exact products for small integer p (covers p = 1, 2 and
// the experiment presets) so repeated evaluation is cheap and consistent.
double pow_p(double r, double p);

// |a-b|^p, p >= 1.
double pdist(std::span<const double> a, std::span<const double> b, double p);

struct Ball {
  std::vector<double> center;
  double radius = 0.0;
};

// Number of cloud points z with |z - center| <= radius (closed ball). The
// intersection with the cube is automatic since points live in the cube.
int ball_count(const PointCloud& cloud, const Ball& ball);

// Discretization of the density event: centers on a cell-centered regular
// grid with center_grid_per_axis points per axis, radii n^{-alpha/d} * 2^k
// for k = 0..radius_levels-1, capped at sqrt(d).
struct DensityConfig {
  double alpha = 0.5;
  int center_grid_per_axis = 4;
  int radius_levels = 3;
};

struct DensityWitness {
  std::vector<double> center;
  double radius = 0.0;
  int count = 0;
};

struct DensityReport {
  bool event_holds = false;
  // min over tested balls of count / (n r^d)
  double worst_ratio = 0.0;
  // present iff some tested ball violates count >= n r^d / 2
  std::optional<DensityWitness> witness;
};

// Tests count >= n r^d / 2 over the discretized family of balls.
DensityReport check_density_event(const PointCloud& cloud, const DensityConfig& cfg);

// Discretization used by the experiment harness: grid pitch matched to the
// smallest radius (clamped to at most 16 per axis) and radius levels that
// stop at 1/2, below the boundary-dominated scale.
DensityConfig default_density_config(int n, int d, double alpha);

}  // namespace reco
