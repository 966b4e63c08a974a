// tsp.hpp - monopartite Euclidean TSP with p-costs: tours, nearest-neighbor
// construction, first-improvement 2-opt descent, Held-Karp oracle, and the
// 2-opt / edge-to-energy verifiers.
#pragma once

#include <vector>

#include "reco/matching.hpp"

namespace reco {

// Cyclic visiting order. Canonical form starts at vertex 0 with the second
// element smaller than the last, which fixes rotation and reflection.
struct Tour {
  std::vector<int> order;

  int size() const { return static_cast<int>(order.size()); }
  bool is_permutation() const;
};

Tour canonical_tour(const Tour& t);

struct TourSolution {
  Tour tour;
  double cost = 0.0;
  double p = 1.0;
  bool two_opt_stable = false;
};

// Cyclic sum of p-powered edge lengths; n >= 3.
double tour_cost(const PointCloud& cloud, const Tour& t, double p);

// Greedy tour from `start`; distance ties break toward the smaller index.
Tour nearest_neighbor_tour(const PointCloud& cloud, int start);

// First-improvement 2-opt: scans non-adjacent edge pairs (a,b) in fixed
// lexicographic order and accepts any move decreasing the cost by more than
// 1e-12, reversing the shorter segment. Terminates at a 2-opt stable tour.
TourSolution two_opt_descent(const PointCloud& cloud, const Tour& t0, double p);

// Exact optimum by bitmask dynamic programming, 3 <= n <= 16.
TourSolution held_karp(const PointCloud& cloud, double p);

// Tests the tour 2-opt inequality over all non-adjacent edge pairs with
// relative slack 1e-9; empty result means 2-opt stable.
std::vector<PairViolation> verify_tour_two_opt(const PointCloud& cloud, const Tour& t, double p);

// Local edge-to-energy control for 2-opt stable tours: per tour edge e, the
// midpoint ball of radius epsilon|e| is tested against
//   N_{B_e} |e|^p <= 2 * max(c_pair, (1/2-eps)^-p) * sum_{tau(b) in B_e} |succ edge of b|^p.
// The geometric fallback constant covers the one successor edge adjacent to
// e (it has length >= (1/2-eps)|e| whenever its tail lies in the ball), and
// the factor 2 the double-counting of edges seen from both endpoints.
EdgeEnergyReport verify_tsp_edge_energy(const PointCloud& cloud, const Tour& t, double p,
                                        const EdgeEnergyConstants& consts);

// Longest tour edge (length, not p-power).
double max_tour_edge(const PointCloud& cloud, const Tour& t);

}  // namespace reco
