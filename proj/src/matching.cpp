#include "reco/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace reco {

namespace {

constexpr double kRelTol = 1e-9;

void require_clouds(const PointCloud& X, const PointCloud& Y) {
  if (X.dim != Y.dim) throw std::invalid_argument("matching: dimension mismatch");
  if (X.size() != Y.size()) throw std::invalid_argument("matching: size mismatch");
  if (X.size() < 1) throw std::invalid_argument("matching: empty clouds");
}

void require_matching(const PointCloud& X, const Matching& m) {
  if (m.size() != X.size() || !m.is_permutation())
    throw std::invalid_argument("matching: sigma is not a permutation of the right size");
}

// Dense p-cost matrix c[i*n+j] = |X_i - Y_j|^p.
std::vector<double> cost_matrix(const PointCloud& X, const PointCloud& Y, double p) {
  const int n = X.size();
  const int d = X.dim;
  std::vector<double> c(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const double* xi = X.coords.data() + static_cast<std::size_t>(i) * d;
    double* row = c.data() + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j) {
      const double* yj = Y.coords.data() + static_cast<std::size_t>(j) * d;
      double s2 = 0.0;
      for (int k = 0; k < d; ++k) {
        const double t = xi[k] - yj[k];
        s2 += t * t;
      }
      row[j] = pow_p(std::sqrt(s2), p);
    }
  }
  return c;
}

}  // namespace

bool Matching::is_permutation() const {
  const int n = size();
  std::vector<char> seen(n, 0);
  for (int v : sigma) {
    if (v < 0 || v >= n || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

double matching_cost(const PointCloud& X, const PointCloud& Y, const Matching& m, double p) {
  require_clouds(X, Y);
  require_matching(X, m);
  double total = 0.0;
  for (int i = 0; i < X.size(); ++i) total += pdist(X.point(i), Y.point(m.sigma[i]), p);
  return total;
}

double matching_qcost(const PointCloud& X, const PointCloud& Y, const Matching& m, double q) {
  return matching_cost(X, Y, m, q);
}

MatchingSolution solve_matching_exact(const PointCloud& X, const PointCloud& Y, double p) {
  require_clouds(X, Y);
  const int n = X.size();
  const std::vector<double> a = cost_matrix(X, Y, p);
  const double kInf = std::numeric_limits<double>::infinity();

  std::vector<double> v(n, 0.0);
  std::vector<int> rowsol(n, -1), colsol(n, -1);

  // Column reduction: assign each column's minimum row if still free.
  for (int j = n - 1; j >= 0; --j) {
    double mn = a[j];
    int imin = 0;
    for (int i = 1; i < n; ++i) {
      const double t = a[static_cast<std::size_t>(i) * n + j];
      if (t < mn) {
        mn = t;
        imin = i;
      }
    }
    v[j] = mn;
    if (rowsol[imin] == -1) {
      rowsol[imin] = j;
      colsol[j] = imin;
    }
  }

  // Augmenting row reduction, two passes.
  std::vector<int> freerows;
  for (int i = 0; i < n; ++i)
    if (rowsol[i] == -1) freerows.push_back(i);
  for (int pass = 0; pass < 2 && !freerows.empty(); ++pass) {
    std::vector<int> nextfree;
    for (int f : freerows) {
      const double* row = a.data() + static_cast<std::size_t>(f) * n;
      double m1 = kInf, m2 = kInf;
      int j1 = -1, j2 = -1;
      for (int j = 0; j < n; ++j) {
        const double t = row[j] - v[j];
        if (t < m1) {
          m2 = m1;
          j2 = j1;
          m1 = t;
          j1 = j;
        } else if (t < m2) {
          m2 = t;
          j2 = j;
        }
      }
      int i0 = colsol[j1];
      if (m1 < m2) {
        v[j1] -= m2 - m1;
      } else if (i0 != -1 && j2 != -1) {
        j1 = j2;
        i0 = colsol[j1];
      }
      rowsol[f] = j1;
      colsol[j1] = f;
      if (i0 != -1) {
        rowsol[i0] = -1;
        nextfree.push_back(i0);
      }
    }
    freerows.swap(nextfree);
  }

  // Shortest augmenting path for the remaining free rows.
  std::vector<double> distv(n);
  std::vector<int> pred(n);
  std::vector<char> done(n);
  std::vector<int> scanned;
  for (int f : freerows) {
    const double* frow = a.data() + static_cast<std::size_t>(f) * n;
    for (int j = 0; j < n; ++j) {
      distv[j] = frow[j] - v[j];
      pred[j] = f;
      done[j] = 0;
    }
    scanned.clear();
    int endj = -1;
    double mind = 0.0;
    for (;;) {
      mind = kInf;
      int jmin = -1;
      for (int j = 0; j < n; ++j)
        if (!done[j] && distv[j] < mind) {
          mind = distv[j];
          jmin = j;
        }
      done[jmin] = 1;
      scanned.push_back(jmin);
      if (colsol[jmin] == -1) {
        endj = jmin;
        break;
      }
      const int i0 = colsol[jmin];
      const double* row = a.data() + static_cast<std::size_t>(i0) * n;
      const double h = row[jmin] - v[jmin] - mind;
      for (int j = 0; j < n; ++j)
        if (!done[j]) {
          const double nd = row[j] - v[j] - h;
          if (nd < distv[j]) {
            distv[j] = nd;
            pred[j] = i0;
          }
        }
    }
    for (int j : scanned) v[j] += distv[j] - mind;
    int j = endj;
    for (;;) {
      const int i = pred[j];
      colsol[j] = i;
      const int jn = rowsol[i];
      rowsol[i] = j;
      if (i == f) break;
      j = jn;
    }
  }

  MatchingSolution sol;
  sol.matching.sigma = std::move(rowsol);
  sol.p = p;
  sol.cost = matching_cost(X, Y, sol.matching, p);
  return sol;
}

MatchingSolution brute_force_matching(const PointCloud& X, const PointCloud& Y, double p) {
  require_clouds(X, Y);
  const int n = X.size();
  if (n > 10) throw std::invalid_argument("brute_force_matching: n > 10");
  const std::vector<double> a = cost_matrix(X, Y, p);

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (int i = 0; i < n; ++i) c += a[static_cast<std::size_t>(i) * n + perm[i]];
    // strict improvement keeps the lexicographically smallest minimizer
    if (c < best_cost) {
      best_cost = c;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  MatchingSolution sol;
  sol.matching.sigma = std::move(best);
  sol.p = p;
  sol.cost = best_cost;
  return sol;
}

MatchingGradient matching_cost_gradient(const PointCloud& X, const PointCloud& Y,
                                        const Matching& m, double p) {
  require_clouds(X, Y);
  require_matching(X, m);
  if (!(p > 1.0)) throw std::invalid_argument("matching_cost_gradient: requires p > 1");
  const int n = X.size();
  const int d = X.dim;
  MatchingGradient g;
  g.x_grad.assign(static_cast<std::size_t>(n) * d, 0.0);
  g.y_grad.assign(static_cast<std::size_t>(n) * d, 0.0);
  for (int i = 0; i < n; ++i) {
    const int j = m.sigma[i];
    const double len = dist(X.point(i), Y.point(j));
    if (len == 0.0) {
      if (p < 2.0)
        throw std::domain_error("matching_cost_gradient: singular zero-length edge " +
                                std::to_string(i) + " at p < 2");
      continue;  // p >= 2: gradient vanishes on zero-length edges
    }
    const double factor = p * pow_p(len, p - 1.0) / len;  // p |e|^{p-2}
    for (int k = 0; k < d; ++k) {
      const double diff = X.point(i)[k] - Y.point(j)[k];
      g.x_grad[static_cast<std::size_t>(i) * d + k] = factor * diff;
      g.y_grad[static_cast<std::size_t>(j) * d + k] = -factor * diff;
    }
  }
  return g;
}

std::vector<PairViolation> verify_matching_two_opt(const PointCloud& X, const PointCloud& Y,
                                                   const Matching& m, double p) {
  require_clouds(X, Y);
  require_matching(X, m);
  const int n = X.size();
  std::vector<PairViolation> out;
  std::vector<double> edge_cost(n);
  for (int i = 0; i < n; ++i) edge_cost[i] = pdist(X.point(i), Y.point(m.sigma[i]), p);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double lhs = edge_cost[i] + edge_cost[j];
      const double rhs = pdist(X.point(i), Y.point(m.sigma[j]), p) +
                         pdist(X.point(j), Y.point(m.sigma[i]), p);
      if (lhs > rhs + kRelTol * (1.0 + lhs)) out.push_back({i, j, lhs - rhs});
    }
  }
  return out;
}

EdgeEnergyConstants edge_energy_constants(double p) {
  if (!(p > 1.0)) throw std::invalid_argument("edge_energy_constants: requires p > 1");

  const double max_margin = 1.0 - std::pow(2.0, 1.0 - p);  // eta, epsilon -> 0 limit
  const double margin_target = std::min(0.1, 0.5 * max_margin);
  const double budget = (1.0 - margin_target) / std::pow(0.5, p);  // (2+eta)(1/2+eps)^p <= 1-target

  // largest eta = 2^-k keeping (2+eta) <= 2*sqrt(budget/2): half the
  // multiplicative headroom stays available for epsilon
  const double eta_cap = 2.0 * std::sqrt(budget / 2.0) - 2.0;
  double eta = 0.0;
  for (int k = 1; k <= 40; ++k) {
    const double cand = std::pow(2.0, -k);
    if (cand <= eta_cap) {
      eta = cand;
      break;
    }
  }
  if (eta == 0.0)
    throw std::domain_error("edge_energy_constants: no admissible eta on the grid (p too close to 1)");

  // largest epsilon = 2^-k/4 with margin >= margin_target
  double epsilon = 0.0;
  for (int k = 0; k <= 40; ++k) {
    const double cand = std::pow(2.0, -k) / 4.0;
    if ((2.0 + eta) * std::pow(0.5 + cand, p) <= 1.0 - margin_target) {
      epsilon = cand;
      break;
    }
  }
  if (epsilon == 0.0)
    throw std::domain_error("edge_energy_constants: no admissible epsilon on the grid");

  EdgeEnergyConstants consts;
  consts.p = p;
  consts.eta = eta;
  consts.epsilon = epsilon;
  consts.margin = 1.0 - (2.0 + eta) * std::pow(0.5 + epsilon, p);
  const double c_eta_p = std::pow(1.0 - std::pow(1.0 + eta, -1.0 / (p - 1.0)), 1.0 - p);
  consts.c_pair = (c_eta_p - 1.0) / consts.margin;
  return consts;
}

EdgeEnergyReport verify_local_edge_energy(const PointCloud& X, const PointCloud& Y,
                                          const Matching& m, double p,
                                          const EdgeEnergyConstants& consts) {
  require_clouds(X, Y);
  require_matching(X, m);
  if (!(p > 1.0)) throw std::invalid_argument("verify_local_edge_energy: requires p > 1");
  if (!verify_matching_two_opt(X, Y, m, p).empty())
    throw std::invalid_argument("verify_local_edge_energy: matching is not 2-opt stable");

  const int n = X.size();
  const int d = X.dim;
  std::vector<double> edge_cost(n);
  for (int i = 0; i < n; ++i) edge_cost[i] = pdist(X.point(i), Y.point(m.sigma[i]), p);

  EdgeEnergyReport report;
  report.holds = true;
  report.pair_holds = true;
  report.worst_slack = std::numeric_limits<double>::infinity();
  report.worst_pair_slack = std::numeric_limits<double>::infinity();
  report.per_edge.reserve(n);

  for (int i = 0; i < n; ++i) {
    const double len = dist(X.point(i), Y.point(m.sigma[i]));
    EdgeEnergyEntry entry;
    entry.edge = i;
    entry.ball.center.resize(d);
    for (int k = 0; k < d; ++k)
      entry.ball.center[k] = 0.5 * (X.point(i)[k] + Y.point(m.sigma[i])[k]);
    entry.ball.radius = consts.epsilon * len;

    double local_energy = 0.0;
    int count = 0;
    const double r2 = entry.ball.radius * entry.ball.radius;
    for (int j = 0; j < n; ++j) {
      double s2 = 0.0;
      for (int k = 0; k < d; ++k) {
        const double t = X.point(j)[k] - entry.ball.center[k];
        s2 += t * t;
      }
      if (s2 <= r2) {
        ++count;
        local_energy += edge_cost[j];
        if (j != i) {
          const double pair_slack = consts.c_pair * edge_cost[j] - edge_cost[i];
          report.worst_pair_slack = std::min(report.worst_pair_slack, pair_slack);
          if (pair_slack < -kRelTol * (1.0 + edge_cost[i])) report.pair_holds = false;
        }
      }
    }
    entry.count = count;
    entry.lhs = count * edge_cost[i];
    entry.rhs = consts.c_pair * local_energy;
    const double slack = entry.rhs - entry.lhs;
    report.worst_slack = std::min(report.worst_slack, slack);
    if (slack < -kRelTol * (1.0 + std::abs(entry.lhs))) report.holds = false;
    report.per_edge.push_back(std::move(entry));
  }
  return report;
}

double max_matching_edge(const PointCloud& X, const PointCloud& Y, const Matching& m) {
  require_clouds(X, Y);
  require_matching(X, m);
  double mx = 0.0;
  for (int i = 0; i < X.size(); ++i) mx = std::max(mx, dist(X.point(i), Y.point(m.sigma[i])));
  return mx;
}

}  // namespace reco
