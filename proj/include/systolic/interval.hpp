#pragma once

// Certified real enclosures built on MPFR directed rounding.
//
// A RealInterval keeps two mpfr_t endpoints at a fixed working precision; the
// lower endpoint always rounds down, the upper always rounds up, so the real
// value of any composed expression is contained in the result.  Endpoints are
// exact binary floats, which makes containment and ordering queries decidable
// (and lets intervals be serialized losslessly as hex-float strings).

#include <algorithm>
#include <string>

#include <gmpxx.h>
#include <mpfr.h>

#include "systolic/errors.hpp"
#include "systolic/numberfield.hpp"

namespace systolic {

class RealInterval {
 public:
  static constexpr mpfr_prec_t kMinPrec = 16;
  static constexpr mpfr_prec_t kMaxPrec = 1 << 20;

  explicit RealInterval(mpfr_prec_t prec) : prec_(check_prec(prec)) {
    mpfr_init2(lo_, prec_);
    mpfr_init2(hi_, prec_);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
  }

  RealInterval(const RealInterval& o) : prec_(o.prec_) {
    mpfr_init2(lo_, prec_);
    mpfr_init2(hi_, prec_);
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
  }

  RealInterval& operator=(const RealInterval& o) {
    if (this != &o) {
      mpfr_set_prec(lo_, o.prec_);
      mpfr_set_prec(hi_, o.prec_);
      prec_ = o.prec_;
      mpfr_set(lo_, o.lo_, MPFR_RNDD);
      mpfr_set(hi_, o.hi_, MPFR_RNDU);
    }
    return *this;
  }

  ~RealInterval() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
  }

  static RealInterval from_rational(const Rational& q, mpfr_prec_t prec) {
    RealInterval r(prec);
    mpfr_set_q(r.lo_, q.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_, q.get_mpq_t(), MPFR_RNDU);
    return r;
  }

  static RealInterval from_long(long n, mpfr_prec_t prec) {
    RealInterval r(prec);
    mpfr_set_si(r.lo_, n, MPFR_RNDD);
    mpfr_set_si(r.hi_, n, MPFR_RNDU);
    return r;
  }

  // Enclosure of a + b*sqrt(d) under the embedding sqrt(d) > 0.
  static RealInterval from_field(const FieldElement& x, mpfr_prec_t prec) {
    RealInterval sd(prec);
    mpfr_sqrt_ui(sd.lo_, static_cast<unsigned long>(x.d()), MPFR_RNDD);
    mpfr_sqrt_ui(sd.hi_, static_cast<unsigned long>(x.d()), MPFR_RNDU);
    return from_rational(x.a(), prec) + from_rational(x.b(), prec) * sd;
  }

  mpfr_prec_t precision() const { return prec_; }

  friend RealInterval operator+(const RealInterval& x, const RealInterval& y) {
    RealInterval r(std::max(x.prec_, y.prec_));
    mpfr_add(r.lo_, x.lo_, y.lo_, MPFR_RNDD);
    mpfr_add(r.hi_, x.hi_, y.hi_, MPFR_RNDU);
    return r;
  }

  friend RealInterval operator-(const RealInterval& x, const RealInterval& y) {
    RealInterval r(std::max(x.prec_, y.prec_));
    mpfr_sub(r.lo_, x.lo_, y.hi_, MPFR_RNDD);
    mpfr_sub(r.hi_, x.hi_, y.lo_, MPFR_RNDU);
    return r;
  }

  RealInterval operator-() const {
    RealInterval r(prec_);
    mpfr_neg(r.lo_, hi_, MPFR_RNDD);
    mpfr_neg(r.hi_, lo_, MPFR_RNDU);
    return r;
  }

  // All four endpoint products, each rounded in both directions.
  friend RealInterval operator*(const RealInterval& x, const RealInterval& y) {
    RealInterval r(std::max(x.prec_, y.prec_));
    mpfr_t t;
    mpfr_init2(t, r.prec_);
    const mpfr_srcptr xs[2] = {x.lo_, x.hi_};
    const mpfr_srcptr ys[2] = {y.lo_, y.hi_};
    bool first = true;
    for (auto xe : xs)
      for (auto ye : ys) {
        mpfr_mul(t, xe, ye, MPFR_RNDD);
        if (first || mpfr_cmp(t, r.lo_) < 0) mpfr_set(r.lo_, t, MPFR_RNDD);
        mpfr_mul(t, xe, ye, MPFR_RNDU);
        if (first || mpfr_cmp(t, r.hi_) > 0) mpfr_set(r.hi_, t, MPFR_RNDU);
        first = false;
      }
    mpfr_clear(t);
    return r;
  }

  // sqrt, defined only for intervals with lo >= 0.
  RealInterval sqrt() const {
    if (mpfr_sgn(lo_) < 0) throw ArithmeticError("sqrt of interval reaching below zero");
    RealInterval r(prec_);
    mpfr_sqrt(r.lo_, lo_, MPFR_RNDD);
    mpfr_sqrt(r.hi_, hi_, MPFR_RNDU);
    return r;
  }

  // acosh, defined only for intervals with lo >= 1 (monotone increasing).
  RealInterval acosh() const {
    if (mpfr_cmp_ui(lo_, 1) < 0) throw ArithmeticError("acosh of interval reaching below one");
    RealInterval r(prec_);
    mpfr_acosh(r.lo_, lo_, MPFR_RNDD);
    mpfr_acosh(r.hi_, hi_, MPFR_RNDU);
    return r;
  }

  // Exact endpoint queries ---------------------------------------------------

  Rational lower_rational() const {
    require_finite();
    Rational q;
    mpfr_get_q(q.get_mpq_t(), lo_);
    return q;
  }

  Rational upper_rational() const {
    require_finite();
    Rational q;
    mpfr_get_q(q.get_mpq_t(), hi_);
    return q;
  }

  // Exact containment of a field element: lo <= x <= hi as real numbers.
  bool contains(const FieldElement& x) const {
    FieldElement lo_f = FieldElement::rational(x.d(), lower_rational());
    FieldElement hi_f = FieldElement::rational(x.d(), upper_rational());
    return compare(lo_f, x) <= 0 && compare(x, hi_f) <= 0;
  }

  bool subset_of(const RealInterval& outer) const {
    return mpfr_cmp(lo_, outer.lo_) >= 0 && mpfr_cmp(hi_, outer.hi_) <= 0;
  }

  // Strict order of enclosures: every point of *this below every point of o.
  bool strictly_below(const RealInterval& o) const { return mpfr_cmp(hi_, o.lo_) < 0; }

  double width() const {
    mpfr_t t;
    mpfr_init2(t, prec_);
    mpfr_sub(t, hi_, lo_, MPFR_RNDU);
    double w = mpfr_get_d(t, MPFR_RNDU);
    mpfr_clear(t);
    return w;
  }

  double midpoint_double() const {
    mpfr_t t;
    mpfr_init2(t, prec_);
    mpfr_add(t, lo_, hi_, MPFR_RNDN);
    mpfr_div_ui(t, t, 2, MPFR_RNDN);
    double m = mpfr_get_d(t, MPFR_RNDN);
    mpfr_clear(t);
    return m;
  }

  // Decimal rendering of the midpoint with 17 significant digits; used for
  // human-facing columns, never for certification.
  std::string midpoint_decimal() const {
    mpfr_t t;
    mpfr_init2(t, prec_);
    mpfr_add(t, lo_, hi_, MPFR_RNDN);
    mpfr_div_ui(t, t, 2, MPFR_RNDN);
    char* s = nullptr;
    mpfr_asprintf(&s, "%.17Rg", t);
    std::string out(s);
    mpfr_free_str(s);
    mpfr_clear(t);
    return out;
  }

  // Lossless hex-float endpoint strings ("%Ra"), stable across runs.
  std::string lower_hex() const { return hex_of(lo_); }
  std::string upper_hex() const { return hex_of(hi_); }

 private:
  static mpfr_prec_t check_prec(mpfr_prec_t p) {
    if (p < kMinPrec || p > kMaxPrec)
      throw DomainError("interval precision out of range [16, 2^20]: " + std::to_string(p));
    return p;
  }

  void require_finite() const {
    if (!mpfr_number_p(lo_) || !mpfr_number_p(hi_))
      throw InvariantError("interval endpoint is not finite");
  }

  static std::string hex_of(mpfr_srcptr v) {
    char* s = nullptr;
    mpfr_asprintf(&s, "%Ra", v);
    std::string out(s);
    mpfr_free_str(s);
    return out;
  }

  mpfr_prec_t prec_;
  mpfr_t lo_, hi_;
};

}  // namespace systolic
