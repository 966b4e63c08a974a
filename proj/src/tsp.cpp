#include "reco/tsp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace reco {

namespace {

constexpr double kRelTol = 1e-9;
constexpr double kMoveTol = 1e-12;

void require_tour(const PointCloud& cloud, const Tour& t, int min_n) {
  if (cloud.size() < min_n)
    throw std::invalid_argument("tsp: needs at least " + std::to_string(min_n) + " points");
  if (t.size() != cloud.size() || !t.is_permutation())
    throw std::invalid_argument("tsp: order is not a permutation of the right size");
}

double edge_len(const PointCloud& cloud, int a, int b) {
  return dist(cloud.point(a), cloud.point(b));
}

}  // namespace

bool Tour::is_permutation() const {
  const int n = size();
  std::vector<char> seen(n, 0);
  for (int v : order) {
    if (v < 0 || v >= n || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

Tour canonical_tour(const Tour& t) {
  const int n = t.size();
  if (n == 0) return t;
  std::vector<int> pos(n);
  for (int k = 0; k < n; ++k) pos[t.order[k]] = k;
  Tour out;
  out.order.resize(n);
  const int start = pos[0];
  if (n < 3) {
    for (int k = 0; k < n; ++k) out.order[k] = t.order[(start + k) % n];
    return out;
  }
  const int fwd = t.order[(start + 1) % n];
  const int bwd = t.order[(start + n - 1) % n];
  const int step = fwd < bwd ? 1 : n - 1;
  for (int k = 0; k < n; ++k) out.order[k] = t.order[(start + static_cast<std::size_t>(step) * k) % n];
  return out;
}

double tour_cost(const PointCloud& cloud, const Tour& t, double p) {
  require_tour(cloud, t, 3);
  const int n = t.size();
  double total = 0.0;
  for (int k = 0; k < n; ++k)
    total += pow_p(edge_len(cloud, t.order[k], t.order[(k + 1) % n]), p);
  return total;
}

Tour nearest_neighbor_tour(const PointCloud& cloud, int start) {
  const int n = cloud.size();
  if (n < 3) throw std::invalid_argument("nearest_neighbor_tour: needs n >= 3");
  if (start < 0 || start >= n) throw std::invalid_argument("nearest_neighbor_tour: bad start");
  std::vector<char> visited(n, 0);
  Tour t;
  t.order.reserve(n);
  int cur = start;
  visited[cur] = 1;
  t.order.push_back(cur);
  for (int step = 1; step < n; ++step) {
    double best = std::numeric_limits<double>::infinity();
    int next = -1;
    for (int j = 0; j < n; ++j) {
      if (visited[j]) continue;
      const double dcur = edge_len(cloud, cur, j);
      if (dcur < best) {  // strict: ties keep the smaller index
        best = dcur;
        next = j;
      }
    }
    visited[next] = 1;
    t.order.push_back(next);
    cur = next;
  }
  return canonical_tour(t);
}

TourSolution two_opt_descent(const PointCloud& cloud, const Tour& t0, double p) {
  const int n = cloud.size();
  require_tour(cloud, t0, 3);
  TourSolution sol;
  sol.p = p;
  if (n < 4) {
    sol.tour = canonical_tour(t0);
    sol.cost = tour_cost(cloud, sol.tour, p);
    sol.two_opt_stable = true;
    return sol;
  }

  std::vector<int> order = t0.order;
  auto plen = [&](int u, int v) { return pow_p(edge_len(cloud, u, v), p); };

  bool improved = true;
  while (improved) {
    improved = false;
    for (int a = 0; a < n - 2; ++a) {
      const int bmax = (a == 0) ? n - 2 : n - 1;
      for (int b = a + 2; b <= bmax; ++b) {
        const int u = order[a], u1 = order[a + 1];
        const int w = order[b], w1 = order[(b + 1) % n];
        const double delta = plen(u, w) + plen(u1, w1) - plen(u, u1) - plen(w, w1);
        if (delta < -kMoveTol) {
          // reverse the shorter of the two segments between the cut edges
          const int inner = b - a;          // length of order[a+1..b]
          if (inner <= n - inner) {
            std::reverse(order.begin() + a + 1, order.begin() + b + 1);
          } else {
            // reversing the complement yields the same cyclic tour
            std::vector<int> rotated(order.begin() + a + 1, order.begin() + b + 1);
            std::vector<int> outer;
            outer.reserve(n - inner);
            for (int k = (b + 1) % n; k != a + 1; k = (k + 1) % n) outer.push_back(order[k]);
            std::reverse(outer.begin(), outer.end());
            std::copy(rotated.begin(), rotated.end(), order.begin());
            std::copy(outer.begin(), outer.end(), order.begin() + inner);
          }
          improved = true;
        }
      }
    }
  }

  sol.tour = canonical_tour(Tour{std::move(order)});
  sol.cost = tour_cost(cloud, sol.tour, p);
  sol.two_opt_stable = true;
  return sol;
}

TourSolution held_karp(const PointCloud& cloud, double p) {
  const int n = cloud.size();
  if (n < 3 || n > 16) throw std::invalid_argument("held_karp: requires 3 <= n <= 16");

  std::vector<double> c(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      c[static_cast<std::size_t>(i) * n + j] = pow_p(edge_len(cloud, i, j), p);

  const int m = n - 1;  // vertices 1..n-1 over subsets, anchored at 0
  const std::size_t nmask = std::size_t(1) << m;
  const double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dp(nmask * m, kInf);
  std::vector<int> parent(nmask * m, -1);

  for (int j = 0; j < m; ++j)
    dp[(std::size_t(1) << j) * m + j] = c[static_cast<std::size_t>(0) * n + (j + 1)];

  for (std::size_t mask = 1; mask < nmask; ++mask) {
    for (int j = 0; j < m; ++j) {
      if (!(mask & (std::size_t(1) << j))) continue;
      const double cur = dp[mask * m + j];
      if (cur == kInf) continue;
      const std::size_t rest = mask;
      for (int k = 0; k < m; ++k) {
        if (rest & (std::size_t(1) << k)) continue;
        const std::size_t nmask2 = mask | (std::size_t(1) << k);
        const double cand = cur + c[static_cast<std::size_t>(j + 1) * n + (k + 1)];
        if (cand < dp[nmask2 * m + k]) {
          dp[nmask2 * m + k] = cand;
          parent[nmask2 * m + k] = j;
        }
      }
    }
  }

  const std::size_t full = nmask - 1;
  double best = kInf;
  int bestj = -1;
  for (int j = 0; j < m; ++j) {
    const double cand = dp[full * m + j] + c[static_cast<std::size_t>(j + 1) * n + 0];
    if (cand < best) {
      best = cand;
      bestj = j;
    }
  }

  std::vector<int> order;
  order.reserve(n);
  std::size_t mask = full;
  int j = bestj;
  while (j != -1) {
    order.push_back(j + 1);
    const int pj = parent[mask * m + j];
    mask ^= std::size_t(1) << j;
    j = pj;
  }
  order.push_back(0);
  std::reverse(order.begin(), order.end());

  TourSolution sol;
  sol.tour = canonical_tour(Tour{std::move(order)});
  sol.p = p;
  sol.cost = tour_cost(cloud, sol.tour, p);
  sol.two_opt_stable = true;
  return sol;
}

std::vector<PairViolation> verify_tour_two_opt(const PointCloud& cloud, const Tour& t, double p) {
  const int n = cloud.size();
  require_tour(cloud, t, 4);
  std::vector<PairViolation> out;
  std::vector<double> ecost(n);
  for (int k = 0; k < n; ++k)
    ecost[k] = pow_p(edge_len(cloud, t.order[k], t.order[(k + 1) % n]), p);
  for (int a = 0; a < n - 2; ++a) {
    const int bmax = (a == 0) ? n - 2 : n - 1;
    for (int b = a + 2; b <= bmax; ++b) {
      const double lhs = ecost[a] + ecost[b];
      const double rhs = pow_p(edge_len(cloud, t.order[a], t.order[b]), p) +
                         pow_p(edge_len(cloud, t.order[a + 1], t.order[(b + 1) % n]), p);
      if (lhs > rhs + kRelTol * (1.0 + lhs)) out.push_back({a, b, lhs - rhs});
    }
  }
  return out;
}

EdgeEnergyReport verify_tsp_edge_energy(const PointCloud& cloud, const Tour& t, double p,
                                        const EdgeEnergyConstants& consts) {
  const int n = cloud.size();
  require_tour(cloud, t, 4);
  if (!(p > 1.0)) throw std::invalid_argument("verify_tsp_edge_energy: requires p > 1");
  if (!verify_tour_two_opt(cloud, t, p).empty())
    throw std::invalid_argument("verify_tsp_edge_energy: tour is not 2-opt stable");

  const int d = cloud.dim;
  std::vector<double> succ_cost(n);  // p-cost of the edge leaving position k
  for (int k = 0; k < n; ++k)
    succ_cost[k] = pow_p(edge_len(cloud, t.order[k], t.order[(k + 1) % n]), p);

  const double c_check =
      2.0 * std::max(consts.c_pair, pow_p(1.0 / (0.5 - consts.epsilon), p));

  EdgeEnergyReport report;
  report.holds = true;
  report.pair_holds = true;
  report.worst_slack = std::numeric_limits<double>::infinity();
  report.worst_pair_slack = std::numeric_limits<double>::infinity();
  report.per_edge.reserve(n);

  for (int a = 0; a < n; ++a) {
    const int u = t.order[a], u1 = t.order[(a + 1) % n];
    const double len = edge_len(cloud, u, u1);
    EdgeEnergyEntry entry;
    entry.edge = a;
    entry.ball.center.resize(d);
    for (int k = 0; k < d; ++k)
      entry.ball.center[k] = 0.5 * (cloud.point(u)[k] + cloud.point(u1)[k]);
    entry.ball.radius = consts.epsilon * len;

    const double r2 = entry.ball.radius * entry.ball.radius;
    int count = 0;
    double local = 0.0;
    for (int b = 0; b < n; ++b) {
      const int v = t.order[b];
      double s2 = 0.0;
      for (int k = 0; k < d; ++k) {
        const double dt = cloud.point(v)[k] - entry.ball.center[k];
        s2 += dt * dt;
      }
      if (s2 > r2) continue;
      ++count;
      local += succ_cost[b];
      if (b != a && b != (a + 1) % n) {
        const double pair_slack = 0.5 * c_check * succ_cost[b] - succ_cost[a];
        report.worst_pair_slack = std::min(report.worst_pair_slack, pair_slack);
        if (pair_slack < -kRelTol * (1.0 + succ_cost[a])) report.pair_holds = false;
      }
    }
    entry.count = count;
    entry.lhs = count * succ_cost[a];
    entry.rhs = c_check * local;
    const double slack = entry.rhs - entry.lhs;
    report.worst_slack = std::min(report.worst_slack, slack);
    if (slack < -kRelTol * (1.0 + std::abs(entry.lhs))) report.holds = false;
    report.per_edge.push_back(std::move(entry));
  }
  return report;
}

double max_tour_edge(const PointCloud& cloud, const Tour& t) {
  require_tour(cloud, t, 3);
  const int n = t.size();
  double mx = 0.0;
  for (int k = 0; k < n; ++k)
    mx = std::max(mx, edge_len(cloud, t.order[k], t.order[(k + 1) % n]));
  return mx;
}

}  // namespace reco
