#include <cmath>
#include <limits>

#include "dampstring/linalg.hpp"

namespace dampstring {

// Implicit QL on a complex symmetric tridiagonal matrix. Rotations satisfy
// c^2 + s^2 = 1 rather than |c|^2 + |s|^2 = 1, so the transformation is a
// complex orthogonal similarity; symmetry and tridiagonal form are preserved.
CVec complex_symmetric_tridiagonal_eigenvalues(CVec d, CVec e, int max_iter_per_value) {
  const int n = static_cast<int>(d.size());
  if (n == 0) return d;
  if (e.size() != n - 1) throw std::invalid_argument("offdiagonal must have n-1 entries");
  e.conservativeResize(n);
  e[n - 1] = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    while (true) {
      int m = l;
      for (; m < n - 1; ++m) {
        double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (iter++ == max_iter_per_value)
        throw EigensolverError("complex symmetric QL did not converge", l);

      cplx g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      cplx r = std::sqrt(g * g + 1.0);
      cplx gp = g + r, gm = g - r;
      g = d[m] - d[l] + e[l] / (std::abs(gp) >= std::abs(gm) ? gp : gm);
      if (iter % 20 == 0) g *= cplx(1.0, 1e-3);  // exceptional shift

      cplx s = 1.0, c = 1.0, p = 0.0;
      bool deflated = false;
      for (int i = m - 1; i >= l; --i) {
        cplx f = s * e[i];
        cplx b = c * e[i];
        r = std::sqrt(f * f + g * g);
        e[i + 1] = r;
        if (r == cplx(0.0, 0.0)) {
          d[i + 1] -= p;
          e[m] = 0.0;
          deflated = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
      }
      if (deflated) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
  return d;
}

} // namespace dampstring
