// matching.hpp - exact Euclidean bipartite p-matching, its gradient, and the
// verifiers turning 2-opt stability into local edge-to-energy control.
#pragma once

#include <vector>

#include "reco/geometry.hpp"

namespace reco {

// Permutation pairing X_i with Y_{sigma[i]}.
struct Matching {
  std::vector<int> sigma;

  int size() const { return static_cast<int>(sigma.size()); }
  bool is_permutation() const;
};

struct MatchingSolution {
  Matching matching;
  double cost = 0.0;
  double p = 1.0;
};

// sum_i |X_i - Y_{sigma(i)}|^p
double matching_cost(const PointCloud& X, const PointCloud& Y, const Matching& m, double p);

// q-energy of a (typically p-optimal) matching: sum_i |X_i - Y_{sigma(i)}|^q.
double matching_qcost(const PointCloud& X, const PointCloud& Y, const Matching& m, double q);

// Globally optimal assignment for the dense cost matrix c_ij = pdist(X_i, Y_j, p).
// Shortest augmenting path (Jonker-Volgenant) in O(n^3) worst case.
MatchingSolution solve_matching_exact(const PointCloud& X, const PointCloud& Y, double p);

// Exhaustive minimum over all n! permutations, n <= 10. Ties broken toward
// the lexicographically smallest sigma.
MatchingSolution brute_force_matching(const PointCloud& X, const PointCloud& Y, double p);

// Per-point gradients of the matching cost at fixed sigma. The Y gradients
// are the negatives of the paired X gradients. Requires p > 1; a zero-length
// edge is singular for p < 2 and rejected.
struct MatchingGradient {
  std::vector<double> x_grad;  // n*d, row-major
  std::vector<double> y_grad;
};
MatchingGradient matching_cost_gradient(const PointCloud& X, const PointCloud& Y,
                                        const Matching& m, double p);

struct PairViolation {
  int i = 0;
  int j = 0;
  double deficit = 0.0;  // LHS - RHS of the swap inequality
};

// Tests the two-point swap inequality
//   |x_i-y_s(i)|^p + |x_j-y_s(j)|^p <= |x_i-y_s(j)|^p + |x_j-y_s(i)|^p
// over all pairs i < j, with relative slack 1e-9. Empty result means the
// matching is 2-opt stable (cyclical monotonicity).
std::vector<PairViolation> verify_matching_two_opt(const PointCloud& X, const PointCloud& Y,
                                                   const Matching& m, double p);

// Admissible constants for the local edge-to-energy inequality, p > 1.
//
// For a 2-opt stable matching, an edge e_i, and x_j inside the midpoint ball
// of radius epsilon|e_i|, the swap inequality plus triangle bounds give
//   |e_i|^p + |e_j|^p <= (2+eta)(1/2+epsilon)^p |e_i|^p + C_{eta,p} |e_j|^p,
// with C_{eta,p} = (1-(1+eta)^{-1/(p-1)})^{1-p} the sharp constant in
// (a+b)^p <= (1+eta)a^p + C_{eta,p}b^p. Rearranged:
//   |e_i|^p <= c_pair |e_j|^p,  c_pair = (C_{eta,p}-1)/margin,
//   margin = 1 - (2+eta)(1/2+epsilon)^p > 0.
struct EdgeEnergyConstants {
  double p = 2.0;
  double epsilon = 0.0;  // ball radius factor, in (0, 1/4]
  double eta = 0.0;
  double c_pair = 0.0;
  double margin = 0.0;
};

// Grid-search construction: eta is the largest 2^-k (k = 1..40) keeping half
// of the multiplicative budget for epsilon, then epsilon is the largest
// 2^-k/4 (k = 0..40) with margin >= margin_target(p). The target is
// min(0.1, (1 - 2^{1-p})/2), positive for every p > 1.
EdgeEnergyConstants edge_energy_constants(double p);

struct EdgeEnergyEntry {
  int edge = 0;
  Ball ball;
  int count = 0;
  double lhs = 0.0;  // count * |e|^p
  double rhs = 0.0;  // constant * local p-energy
};

struct EdgeEnergyReport {
  bool holds = false;
  double worst_slack = 0.0;  // min over edges of rhs - lhs
  bool pair_holds = false;   // per-pair form |e_i|^p <= c |e_j|^p
  double worst_pair_slack = 0.0;
  std::vector<EdgeEnergyEntry> per_edge;
};

// Checks N_{B_i} |e_i|^p <= c_pair * sum_{x_j in B_i} |e_j|^p per edge, and
// the per-pair form individually. Requires a 2-opt stable matching.
EdgeEnergyReport verify_local_edge_energy(const PointCloud& X, const PointCloud& Y,
                                          const Matching& m, double p,
                                          const EdgeEnergyConstants& consts);

// max_i |X_i - Y_{sigma(i)}| (length, not p-power)
double max_matching_edge(const PointCloud& X, const PointCloud& Y, const Matching& m);

}  // namespace reco
