#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dampstring {

enum class CoefficientKind { Density, Damping, General };

// One piece on [a, b). Values are num(x) / den(x) with both polynomials in
// the global variable x, ascending degree. An empty den means den == 1.
struct Piece {
  double a = 0.0;
  double b = 1.0;
  std::vector<double> num;
  std::vector<double> den;

  bool is_polynomial() const { return den.empty(); }
  double eval(double x) const;
};

struct CoefficientSpec {
  std::vector<Piece> pieces;
  CoefficientKind kind = CoefficientKind::General;

  // Breakpoints of the partition, including 0 and 1.
  std::vector<double> breakpoints() const;
  bool is_polynomial() const;
  // Text in the coefficient grammar; empty for rational specs.
  std::string to_text() const;
};

class CoefficientError : public std::runtime_error {
 public:
  CoefficientError(const std::string& what, std::size_t position = npos)
      : std::runtime_error(what), position_(position) {}
  std::size_t position() const { return position_; }
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::size_t position_;
};

// Grammar: `const <r>` | `poly <c0> <c1> ...` | `piece <a> <b>: <sub>; ...`
CoefficientSpec parse_coefficient_spec(std::string_view text,
                                       CoefficientKind kind = CoefficientKind::General);

// Validates the partition and the kind-specific invariants; throws CoefficientError.
void validate(const CoefficientSpec& spec);

CoefficientSpec constant(double value, CoefficientKind kind = CoefficientKind::General);
CoefficientSpec polynomial(std::vector<double> coeffs,
                           CoefficientKind kind = CoefficientKind::General);

// Right-limit at interior breakpoints; the last piece is closed at 1.
double sample(const CoefficientSpec& spec, double x);

// Exact integral over [a, b] of the product of the factors (polynomial pieces only).
double integrate_product(const std::vector<CoefficientSpec>& factors, double a, double b);

// (rho / c^2, alpha / c^2) as rational pieces.
std::pair<CoefficientSpec, CoefficientSpec> reduce_variable_speed(const CoefficientSpec& rho,
                                                                  const CoefficientSpec& alpha,
                                                                  const CoefficientSpec& c);

// Polynomial helpers on ascending coefficient lists.
double poly_eval(const std::vector<double>& p, double x);
std::vector<double> poly_mul(const std::vector<double>& p, const std::vector<double>& q);
std::vector<double> poly_antiderivative(const std::vector<double>& p);

} // namespace dampstring
