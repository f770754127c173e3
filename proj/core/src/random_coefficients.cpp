#include "dampstring/random_coefficients.hpp"

#include <algorithm>
#include <random>

namespace dampstring {

std::vector<double> bernstein_to_monomial(const std::vector<double>& b, double a, double bb) {
  const int d = static_cast<int>(b.size()) - 1;
  const double w = bb - a;
  const std::vector<double> t{-a / w, 1.0 / w};
  const std::vector<double> s{1.0 + a / w, -1.0 / w};
  std::vector<double> out(std::max(d + 1, 1), 0.0);
  double binom = 1.0;
  for (int k = 0; k <= d; ++k) {
    std::vector<double> term{binom * b[k]};
    for (int i = 0; i < k; ++i) term = poly_mul(term, t);
    for (int i = 0; i < d - k; ++i) term = poly_mul(term, s);
    for (std::size_t i = 0; i < term.size(); ++i) out[i] += term[i];
    binom = binom * (d - k) / (k + 1);
  }
  return out;
}

CoefficientSpec random_piecewise(std::uint64_t seed, double lo, double hi, int max_degree,
                                 int max_pieces, CoefficientKind kind) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> npieces(1, std::max(1, max_pieces));
  std::uniform_int_distribution<int> degree(0, std::max(0, max_degree));
  std::uniform_real_distribution<double> value(lo, hi);
  std::uniform_real_distribution<double> cut(0.1, 0.9);

  int k = npieces(rng);
  std::vector<double> br{0.0, 1.0};
  for (int i = 1; i < k; ++i) br.push_back(cut(rng));
  std::sort(br.begin(), br.end());

  CoefficientSpec spec;
  spec.kind = kind;
  for (int i = 0; i < k; ++i) {
    std::vector<double> b(degree(rng) + 1);
    for (double& c : b) c = value(rng);
    Piece p;
    p.a = br[i];
    p.b = br[i + 1];
    p.num = bernstein_to_monomial(b, p.a, p.b);
    spec.pieces.push_back(std::move(p));
  }
  validate(spec);
  return spec;
}

std::pair<CoefficientSpec, CoefficientSpec> random_coefficients(std::uint64_t seed,
                                                                const RandomCoefficientOptions& opt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 master(seq);
  std::uint64_t s_rho = master(), s_alpha = master();
  return {random_piecewise(s_rho, opt.rho_lo, opt.rho_hi, opt.max_degree, opt.max_pieces,
                           CoefficientKind::Density),
          random_piecewise(s_alpha, opt.alpha_lo, opt.alpha_hi, opt.max_degree, opt.max_pieces,
                           CoefficientKind::Damping)};
}

} // namespace dampstring
