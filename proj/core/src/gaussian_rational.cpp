#include "eqlab/gaussian_rational.hpp"

#include <cmath>
#include <stdexcept>

#include "eqlab/errors.hpp"

namespace eqlab {

namespace {

mpq_class exact_double(double v) {
  if (!std::isfinite(v)) throw Error("non-finite coefficient cannot be made exact");
  mpq_class q;
  mpq_set_d(q.get_mpq_t(), v);
  return q;
}

std::string rational_text(const mpq_class& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace

GaussianRational GaussianRational::from_literal(const std::string& text) {
  if (text.empty()) throw Error("empty numeric literal");
  // Base 10 always: "0.012" must not be read as octal.
  auto integer = [&text](const std::string& digits) {
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      throw Error("malformed numeric literal '" + text + "'");
    return mpz_class(digits, 10);
  };
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const mpz_class den = integer(text.substr(slash + 1));
    if (den == 0) throw Error("zero denominator in literal '" + text + "'");
    mpq_class q(integer(text.substr(0, slash)), den);
    q.canonicalize();
    return GaussianRational(q);
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) return GaussianRational(mpq_class(integer(text)));
  mpz_class den = 1;
  for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
  mpq_class q(integer(text.substr(0, dot) + text.substr(dot + 1)), den);
  q.canonicalize();
  return GaussianRational(q);
}

GaussianRational GaussianRational::from_double(std::complex<double> z) {
  return {exact_double(z.real()), exact_double(z.imag())};
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o) {
  if (o.is_zero()) throw std::domain_error("division by zero in Q(i)");
  if (o.is_real()) {
    re_ /= o.re_;
    im_ /= o.re_;
    return *this;
  }
  const mpq_class n = o.norm();
  mpq_class r = (re_ * o.re_ + im_ * o.im_) / n;
  mpq_class i = (im_ * o.re_ - re_ * o.im_) / n;
  re_ = std::move(r);
  im_ = std::move(i);
  return *this;
}

std::string GaussianRational::to_string() const {
  if (is_real()) return rational_text(re_);
  if (sgn(re_) == 0) return "(" + rational_text(im_) + ")*i";
  return "(" + rational_text(re_) + " + (" + rational_text(im_) + ")*i)";
}

}  // namespace eqlab
