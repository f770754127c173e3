#include "dampstring/coefficients.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace dampstring {

namespace {

constexpr double kBreakTol = 1e-12;

struct Token {
  std::string text;
  std::size_t pos;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char ch = s[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
      continue;
    }
    if (ch == ':' || ch == ';') {
      out.push_back({std::string(1, ch), i});
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != ':' &&
           s[i] != ';')
      ++i;
    out.push_back({std::string(s.substr(start, i - start)), start});
  }
  return out;
}

class Parser {
 public:
  Parser(std::string_view text) : toks_(tokenize(text)), end_(text.size()) {}

  CoefficientSpec parse() {
    CoefficientSpec spec;
    if (at_end()) throw CoefficientError("empty coefficient spec", 0);
    if (peek().text == "piece") {
      while (true) {
        expect("piece");
        Piece p;
        p.a = number();
        p.b = number();
        expect(":");
        p.num = sub();
        spec.pieces.push_back(std::move(p));
        if (at_end()) break;
        expect(";");
        if (at_end()) break;
      }
    } else {
      Piece p;
      p.num = sub();
      spec.pieces.push_back(std::move(p));
      if (!at_end()) throw CoefficientError("unexpected token '" + peek().text + "'", peek().pos);
    }
    return spec;
  }

 private:
  std::vector<double> sub() {
    if (at_end()) throw CoefficientError("expected 'const' or 'poly'", end_);
    Token t = next();
    if (t.text == "const") return {number()};
    if (t.text == "poly") {
      std::vector<double> c{number()};
      while (!at_end() && is_number(peek().text)) c.push_back(number());
      return c;
    }
    throw CoefficientError("expected 'const' or 'poly', got '" + t.text + "'", t.pos);
  }

  static bool is_number(const std::string& s) {
    double v;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
  }

  double number() {
    if (at_end()) throw CoefficientError("expected a number", end_);
    Token t = next();
    double v = 0.0;
    const char* first = t.text.data();
    if (!t.text.empty() && t.text[0] == '+') ++first;
    auto res = std::from_chars(first, t.text.data() + t.text.size(), v);
    if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size() || !std::isfinite(v))
      throw CoefficientError("invalid number '" + t.text + "'", t.pos);
    return v;
  }

  void expect(const char* what) {
    if (at_end()) throw CoefficientError(std::string("expected '") + what + "'", end_);
    Token t = next();
    if (t.text != what)
      throw CoefficientError(std::string("expected '") + what + "', got '" + t.text + "'", t.pos);
  }

  bool at_end() const { return i_ >= toks_.size(); }
  const Token& peek() const { return toks_[i_]; }
  Token next() { return toks_[i_++]; }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  std::size_t end_;
};

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string poly_text(const std::vector<double>& c) {
  std::string s = c.size() == 1 ? "const" : "poly";
  for (double v : c) s += " " + fmt17(v);
  return s;
}

const Piece& piece_at(const CoefficientSpec& spec, double x) {
  const auto& ps = spec.pieces;
  for (std::size_t k = 0; k + 1 < ps.size(); ++k)
    if (x < ps[k].b) return ps[k];
  return ps.back();
}

} // namespace

double poly_eval(const std::vector<double>& p, double x) {
  double v = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * x + *it;
  return v;
}

std::vector<double> poly_mul(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.empty() || q.empty()) return {};
  std::vector<double> r(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  return r;
}

std::vector<double> poly_antiderivative(const std::vector<double>& p) {
  std::vector<double> r(p.size() + 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) r[i + 1] = p[i] / static_cast<double>(i + 1);
  return r;
}

double Piece::eval(double x) const {
  double v = poly_eval(num, x);
  if (!den.empty()) v /= poly_eval(den, x);
  return v;
}

std::vector<double> CoefficientSpec::breakpoints() const {
  std::vector<double> bp;
  for (const auto& p : pieces) bp.push_back(p.a);
  bp.push_back(pieces.empty() ? 1.0 : pieces.back().b);
  return bp;
}

bool CoefficientSpec::is_polynomial() const {
  return std::all_of(pieces.begin(), pieces.end(), [](const Piece& p) { return p.is_polynomial(); });
}

std::string CoefficientSpec::to_text() const {
  if (!is_polynomial()) return {};
  if (pieces.size() == 1) return poly_text(pieces[0].num);
  std::string s;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    if (k) s += "; ";
    s += "piece " + fmt17(pieces[k].a) + " " + fmt17(pieces[k].b) + ": " + poly_text(pieces[k].num);
  }
  return s;
}

void validate(const CoefficientSpec& spec) {
  const auto& ps = spec.pieces;
  if (ps.empty()) throw CoefficientError("coefficient spec has no pieces");
  if (std::abs(ps.front().a) > kBreakTol)
    throw CoefficientError("partition must start at 0");
  if (std::abs(ps.back().b - 1.0) > kBreakTol) throw CoefficientError("final piece must end at 1");
  for (std::size_t k = 0; k < ps.size(); ++k) {
    if (!(ps[k].b > ps[k].a)) throw CoefficientError("empty or reversed interval in partition");
    if (ps[k].num.empty()) throw CoefficientError("piece without coefficients");
    for (double c : ps[k].num)
      if (!std::isfinite(c)) throw CoefficientError("non-finite coefficient");
    if (k + 1 < ps.size()) {
      double d = ps[k + 1].a - ps[k].b;
      if (d > kBreakTol) throw CoefficientError("gap in partition");
      if (d < -kBreakTol) throw CoefficientError("overlap in partition");
    }
  }
  constexpr int kProbe = 2048;
  for (const auto& p : ps) {
    for (int i = 0; i <= kProbe; ++i) {
      double x = p.a + (p.b - p.a) * i / kProbe;
      if (!p.den.empty() && poly_eval(p.den, x) == 0.0)
        throw CoefficientError("vanishing denominator");
      double v = p.eval(x);
      if (!std::isfinite(v)) throw CoefficientError("non-finite coefficient value");
      if (spec.kind == CoefficientKind::Density && !(v > 0.0))
        throw CoefficientError("density must be positive on [0,1]");
    }
  }
}

CoefficientSpec parse_coefficient_spec(std::string_view text, CoefficientKind kind) {
  CoefficientSpec spec = Parser(text).parse();
  spec.kind = kind;
  validate(spec);
  return spec;
}

CoefficientSpec constant(double value, CoefficientKind kind) { return polynomial({value}, kind); }

CoefficientSpec polynomial(std::vector<double> coeffs, CoefficientKind kind) {
  CoefficientSpec spec;
  spec.kind = kind;
  spec.pieces.push_back(Piece{0.0, 1.0, std::move(coeffs), {}});
  validate(spec);
  return spec;
}

double sample(const CoefficientSpec& spec, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw CoefficientError("sample point outside [0,1]");
  return piece_at(spec, x).eval(x);
}

namespace {

std::vector<double> merged_breaks(const std::vector<const CoefficientSpec*>& specs, double a,
                                  double b) {
  std::vector<double> bp{a, b};
  for (const auto* s : specs)
    for (double t : s->breakpoints())
      if (t > a && t < b) bp.push_back(t);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end(),
                       [](double u, double v) { return std::abs(u - v) <= kBreakTol; }),
           bp.end());
  return bp;
}

} // namespace

double integrate_product(const std::vector<CoefficientSpec>& factors, double a, double b) {
  if (!(a >= 0.0 && b <= 1.0 && a <= b)) throw CoefficientError("integration interval outside [0,1]");
  if (factors.empty()) throw CoefficientError("malformed factor list: empty");
  std::vector<const CoefficientSpec*> ptrs;
  for (const auto& f : factors) {
    if (f.pieces.empty()) throw CoefficientError("malformed factor list: empty factor");
    if (!f.is_polynomial())
      throw CoefficientError("malformed factor list: rational factor cannot be integrated exactly");
    ptrs.push_back(&f);
  }
  auto bp = merged_breaks(ptrs, a, b);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    double u = bp[k], v = bp[k + 1];
    double mid = 0.5 * (u + v);
    std::vector<double> prod{1.0};
    for (const auto* f : ptrs) prod = poly_mul(prod, piece_at(*f, mid).num);
    auto anti = poly_antiderivative(prod);
    total += poly_eval(anti, v) - poly_eval(anti, u);
  }
  return total;
}

std::pair<CoefficientSpec, CoefficientSpec> reduce_variable_speed(const CoefficientSpec& rho,
                                                                  const CoefficientSpec& alpha,
                                                                  const CoefficientSpec& c) {
  CoefficientSpec cc = c;
  cc.kind = CoefficientKind::Density;
  try {
    validate(cc);
  } catch (const CoefficientError& e) {
    throw CoefficientError(std::string("speed violates positivity: ") + e.what());
  }
  auto bp = merged_breaks({&rho, &alpha, &c}, 0.0, 1.0);
  CoefficientSpec r, al;
  r.kind = CoefficientKind::Density;
  al.kind = CoefficientKind::Damping;
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    double mid = 0.5 * (bp[k] + bp[k + 1]);
    const Piece& pc = piece_at(c, mid);
    // 1/c^2 = dc^2 / nc^2
    std::vector<double> nc2 = poly_mul(pc.num, pc.num);
    std::vector<double> dc2 = pc.den.empty() ? std::vector<double>{1.0} : poly_mul(pc.den, pc.den);
    auto divide = [&](const Piece& p) {
      Piece q;
      q.a = bp[k];
      q.b = bp[k + 1];
      q.num = poly_mul(p.num, dc2);
      q.den = p.den.empty() ? nc2 : poly_mul(p.den, nc2);
      return q;
    };
    r.pieces.push_back(divide(piece_at(rho, mid)));
    al.pieces.push_back(divide(piece_at(alpha, mid)));
  }
  validate(r);
  validate(al);
  return {r, al};
}

} // namespace dampstring
