#include "dampstring/assignment.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace dampstring {

std::vector<int> min_cost_assignment(const RMat& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw std::invalid_argument("assignment cost matrix must be square");
  const double inf = std::numeric_limits<double>::infinity();
  // Potentials formulation with 1-based rows/cols; p[j] is the row matched to column j.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) col[p[j] - 1] = j - 1;
  return col;
}

double multiset_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(a.size());
  if (n == 0) return 0.0;
  RMat cost(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cost(i, j) = std::abs(a[i] - b[j]);
  auto col = min_cost_assignment(cost);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) worst = std::max(worst, cost(i, col[i]));
  return worst;
}

} // namespace dampstring
