#include "eqlab/parser.hpp"

#include <cctype>
#include <limits>
#include <map>

namespace eqlab {

namespace {

/// Not necessarily homogeneous polynomial used during expansion.
using Sparse = std::map<Monomial, GaussianRational, RevlexGreater>;

void accumulate(Sparse& into, const Monomial& m, const GaussianRational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = into.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) into.erase(it);
  }
}

Sparse constant(const GaussianRational& c) {
  Sparse s;
  accumulate(s, Monomial{}, c);
  return s;
}

Sparse multiply(const Sparse& a, const Sparse& b) {
  Sparse out;
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) {
      const Monomial m = monomial_product(ma, mb);
      for (std::size_t v = 0; v < kMaxVars; ++v)
        if (static_cast<int>(ma[v]) + mb[v] > std::numeric_limits<std::uint16_t>::max())
          throw Error("polynomial degree overflow");
      accumulate(out, m, ca * cb);
    }
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& names) : text_(text), names_(names) {
    if (names.size() > kMaxVars) throw DimensionError("too many variables");
  }

  Sparse parse() {
    Sparse s = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return s;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Sparse expr() {
    Sparse acc = term();
    for (;;) {
      if (accept('+')) {
        for (const auto& [m, c] : term()) accumulate(acc, m, c);
      } else if (accept('-')) {
        for (const auto& [m, c] : term()) accumulate(acc, m, -c);
      } else {
        return acc;
      }
    }
  }

  Sparse term() {
    Sparse acc = unary();
    for (;;) {
      if (accept('*')) {
        acc = multiply(acc, unary());
      } else if (accept('/')) {
        const std::size_t at = pos_;
        Sparse d = unary();
        if (d.size() != 1 || d.begin()->first != Monomial{}) {
          pos_ = at;
          fail("division is only allowed by nonzero constants");
        }
        const GaussianRational c = d.begin()->second;
        Sparse out;
        for (const auto& [m, v] : acc) accumulate(out, m, v / c);
        acc = std::move(out);
      } else {
        return acc;
      }
    }
  }

  Sparse unary() {
    if (accept('-')) {
      Sparse s = unary();
      for (auto& [m, c] : s) c = -c;
      return s;
    }
    if (accept('+')) return unary();
    return power();
  }

  Sparse power() {
    Sparse base = atom();
    if (!accept('^')) return base;
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a nonnegative integer exponent");
    if (pos_ - start > 5) fail("exponent too large");
    const int e = std::stoi(std::string(text_.substr(start, pos_ - start)));
    Sparse result = constant(GaussianRational(1));
    Sparse b = base;
    int k = e;
    while (k > 0) {
      if (k & 1) result = multiply(result, b);
      k >>= 1;
      if (k > 0) b = multiply(b, b);
    }
    return result;
  }

  Sparse atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Sparse s = expr();
      if (!accept(')')) fail("expected ')'");
      return s;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      const std::string name(text_.substr(start, pos_ - start));
      for (std::size_t v = 0; v < names_.size(); ++v) {
        if (names_[v] == name) {
          Monomial m{};
          m[v] = 1;
          Sparse s;
          accumulate(s, m, GaussianRational(1));
          return s;
        }
      }
      if (name == "i") return constant(GaussianRational(0, 1));
      pos_ = start;
      fail("unknown variable '" + name + "'");
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  Sparse number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      const std::size_t frac = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (frac == pos_ && frac - 1 == start) fail("malformed number");
    }
    std::string literal(text_.substr(start, pos_ - start));
    if (literal.front() == '.') literal.insert(literal.begin(), '0');
    if (literal.back() == '.') literal.pop_back();
    return constant(GaussianRational::from_literal(literal));
  }

  std::string_view text_;
  const std::vector<std::string>& names_;
  std::size_t pos_ = 0;
};

std::vector<std::string> default_names(std::size_t nvars) {
  std::vector<std::string> names;
  for (std::size_t v = 0; v < nvars; ++v) names.push_back("x" + std::to_string(v));
  return names;
}

}  // namespace

ExactPoly parse_poly(std::string_view text, const std::vector<std::string>& names) {
  const Sparse s = Parser(text, names).parse();
  int lo = std::numeric_limits<int>::max(), hi = -1;
  for (const auto& [m, c] : s) {
    lo = std::min(lo, monomial_degree(m));
    hi = std::max(hi, monomial_degree(m));
  }
  if (hi < 0) return ExactPoly(names.size(), 0);
  if (lo != hi) throw InhomogeneousError(lo, hi);
  ExactPoly p(names.size(), hi);
  for (const auto& [m, c] : s) p.add_term_unchecked(m, c);
  return p;
}

ExactPoly parse_poly(std::string_view text, std::size_t nvars) {
  return parse_poly(text, default_names(nvars));
}

FloatPoly parse_float_poly(std::string_view text, std::size_t nvars) {
  return to_float(parse_poly(text, nvars));
}

ExactMap parse_map(const std::vector<std::string>& components, std::size_t nvars) {
  std::vector<ExactPoly> polys;
  for (const auto& text : components) polys.push_back(parse_poly(text, nvars));
  return ExactMap(std::move(polys));
}

std::vector<GaussianRational> parse_univariate(std::string_view text, const std::string& name) {
  const std::vector<std::string> names{name};
  const Sparse s = Parser(text, names).parse();
  std::vector<GaussianRational> coeffs;
  for (const auto& [m, c] : s) {
    const std::size_t e = m[0];
    if (coeffs.size() <= e) coeffs.resize(e + 1);
    coeffs[e] = c;
  }
  if (coeffs.empty()) coeffs.emplace_back(0);
  return coeffs;
}

}  // namespace eqlab
