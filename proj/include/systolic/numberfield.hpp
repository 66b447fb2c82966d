#pragma once

// Exact arithmetic in a real quadratic field K = Q(sqrt(d)), d squarefree.
//
// Elements are pairs of GMP rationals (a, b) representing a + b*sqrt(d); the
// embedding sending sqrt(d) to the positive real root is the default one, and
// conjugate() switches to the other.  Integrality, ideal membership and
// residue reduction are all decided exactly; nothing in this header touches
// floating point.

#include <cctype>
#include <compare>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "systolic/errors.hpp"

namespace systolic {

using BigInt = mpz_class;
using Rational = mpq_class;

namespace detail {

inline bool squarefree(long d) {
  if (d % 4 == 0) return false;
  for (long p = 3; p <= d / p; p += 2)
    if (d % (p * p) == 0) return false;
  return true;
}

// Validating "is d a sensible field discriminant parameter" costs a trial
// division, so remember the last few values seen on this thread.
inline void validate_field_param(long d) {
  if (d < 2) throw DomainError("field parameter d must be >= 2, got " + std::to_string(d));
  thread_local long seen[4] = {0, 0, 0, 0};  // 0 never matches a valid d
  for (long s : seen)
    if (s == d) return;
  if (!squarefree(d)) throw DomainError("field parameter d must be squarefree, got " + std::to_string(d));
  seen[3] = seen[2];
  seen[2] = seen[1];
  seen[1] = seen[0];
  seen[0] = d;
}

inline Rational make_rational(const BigInt& num, const BigInt& den) {
  if (sgn(den) == 0) throw ArithmeticError("rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

// Exact square root of a nonnegative rational, if one exists.
inline std::optional<Rational> sqrt_rational(const Rational& q) {
  int s = sgn(q);
  if (s < 0) return std::nullopt;
  if (s == 0) return Rational(0);
  const BigInt& num = q.get_num();
  const BigInt& den = q.get_den();
  if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
    return std::nullopt;
  BigInt rn, rd;
  mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
  return make_rational(rn, rd);
}

}  // namespace detail

class FieldElement {
 public:
  // a + b*sqrt(d).  Throws DomainError unless d >= 2 and squarefree.
  // Caller-supplied rationals are canonicalized: mpq equality (and therefore
  // every comparison in this library) is only defined on canonical forms.
  FieldElement(long d, Rational a, Rational b)
      : d_(d), a_(std::move(a)), b_(std::move(b)) {
    detail::validate_field_param(d_);
    if (sgn(a_.get_den()) == 0 || sgn(b_.get_den()) == 0)
      throw ArithmeticError("field element coefficient with zero denominator");
    a_.canonicalize();
    b_.canonicalize();
  }

  static FieldElement zero(long d) { return FieldElement(d, Rational(0), Rational(0)); }
  static FieldElement one(long d) { return FieldElement(d, Rational(1), Rational(0)); }
  static FieldElement integer(long d, long n) { return FieldElement(d, Rational(n), Rational(0)); }
  static FieldElement rational(long d, Rational r) { return FieldElement(d, std::move(r), Rational(0)); }
  static FieldElement sqrt_d(long d) { return FieldElement(d, Rational(0), Rational(1)); }

  // omega = (1+sqrt(d))/2 when d = 1 mod 4, else sqrt(d); {1, omega} is an
  // integral basis of the ring of integers.
  static FieldElement omega(long d) {
    detail::validate_field_param(d);
    if (d % 4 == 1) return FieldElement(d, detail::make_rational(1, 2), detail::make_rational(1, 2));
    return sqrt_d(d);
  }

  long d() const { return d_; }
  const Rational& a() const { return a_; }  // coefficient of 1
  const Rational& b() const { return b_; }  // coefficient of sqrt(d)

  bool is_zero() const { return sgn(a_) == 0 && sgn(b_) == 0; }
  bool is_rational() const { return sgn(b_) == 0; }
  bool is_one() const { return a_ == 1 && sgn(b_) == 0; }

  FieldElement conjugate() const { return FieldElement(d_, a_, -b_); }
  Rational norm() const { return a_ * a_ - d_ * b_ * b_; }
  Rational trace() const { return 2 * a_; }

  // Algebraic-integer test: trace and norm both rational integers.  For a
  // quadratic field this is exactly membership in the ring of integers.
  bool is_integral() const {
    return detail::is_integer(trace()) && detail::is_integer(norm());
  }

  // Sign under the embedding sqrt(d) > 0, decided without floating point.
  // Mixed-sign case compares a^2 against d b^2; equality is impossible
  // because sqrt(d) is irrational.
  int sign() const {
    int sa = sgn(a_), sb = sgn(b_);
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    int c = cmp(a_ * a_, d_ * b_ * b_);
    if (c == 0) throw InvariantError("a^2 = d b^2 with a,b nonzero: d is not squarefree");
    return c > 0 ? sa : sb;
  }

  FieldElement operator-() const { return FieldElement(d_, -a_, -b_); }

  friend FieldElement operator+(const FieldElement& x, const FieldElement& y) {
    x.require_same_field(y);
    return FieldElement(x.d_, x.a_ + y.a_, x.b_ + y.b_);
  }
  friend FieldElement operator-(const FieldElement& x, const FieldElement& y) {
    x.require_same_field(y);
    return FieldElement(x.d_, x.a_ - y.a_, x.b_ - y.b_);
  }
  friend FieldElement operator*(const FieldElement& x, const FieldElement& y) {
    x.require_same_field(y);
    return FieldElement(x.d_, x.a_ * y.a_ + x.d_ * x.b_ * y.b_, x.a_ * y.b_ + x.b_ * y.a_);
  }
  friend FieldElement operator/(const FieldElement& x, const FieldElement& y) {
    x.require_same_field(y);
    if (y.is_zero()) throw ArithmeticError("division by zero in Q(sqrt(d))");
    Rational n = y.norm();  // nonzero: y != 0 and the field is real
    return FieldElement(x.d_, (x.a_ * y.a_ - x.d_ * x.b_ * y.b_) / n, (x.b_ * y.a_ - x.a_ * y.b_) / n);
  }

  friend FieldElement operator*(const FieldElement& x, const Rational& c) {
    return FieldElement(x.d_, x.a_ * c, x.b_ * c);
  }
  friend FieldElement operator*(const Rational& c, const FieldElement& x) { return x * c; }
  friend FieldElement operator/(const FieldElement& x, const Rational& c) {
    if (sgn(c) == 0) throw ArithmeticError("division by zero rational");
    return FieldElement(x.d_, x.a_ / c, x.b_ / c);
  }
  friend FieldElement operator+(const FieldElement& x, long n) {
    return FieldElement(x.d_, x.a_ + n, x.b_);
  }
  friend FieldElement operator-(const FieldElement& x, long n) {
    return FieldElement(x.d_, x.a_ - n, x.b_);
  }
  friend FieldElement operator*(const FieldElement& x, long n) {
    return FieldElement(x.d_, x.a_ * n, x.b_ * n);
  }

  friend bool operator==(const FieldElement& x, const FieldElement& y) {
    return x.d_ == y.d_ && x.a_ == y.a_ && x.b_ == y.b_;
  }

  FieldElement pow(unsigned e) const {
    FieldElement acc = one(d_), base = *this;
    while (e) {
      if (e & 1u) acc = acc * base;
      base = base * base;
      e >>= 1u;
    }
    return acc;
  }

  FieldElement abs() const { return sign() < 0 ? -*this : *this; }

 private:
  void require_same_field(const FieldElement& y) const {
    if (d_ != y.d_)
      throw DomainError("mixing elements of Q(sqrt(" + std::to_string(d_) + ")) and Q(sqrt(" +
                        std::to_string(y.d_) + "))");
  }

  long d_;
  Rational a_, b_;
};

inline FieldElement conjugate(const FieldElement& x) { return x.conjugate(); }
inline Rational norm(const FieldElement& x) { return x.norm(); }
inline Rational trace(const FieldElement& x) { return x.trace(); }

// Total order induced by the real embedding with sqrt(d) > 0.
inline std::strong_ordering compare(const FieldElement& x, const FieldElement& y) {
  int s = (x - y).sign();
  if (s < 0) return std::strong_ordering::less;
  if (s > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

// Compare |x| against |y| exactly, via the sign of x^2 - y^2.
inline std::strong_ordering compare_abs(const FieldElement& x, const FieldElement& y) {
  int s = (x * x - y * y).sign();
  if (s < 0) return std::strong_ordering::less;
  if (s > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

inline bool operator<(const FieldElement& x, const FieldElement& y) { return compare(x, y) < 0; }
inline bool operator>(const FieldElement& x, const FieldElement& y) { return compare(x, y) > 0; }
inline bool operator<=(const FieldElement& x, const FieldElement& y) { return compare(x, y) <= 0; }
inline bool operator>=(const FieldElement& x, const FieldElement& y) { return compare(x, y) >= 0; }

// Coordinates (p, q) of an integral element as p + q*omega.
struct OmegaCoords {
  BigInt p, q;
};

inline std::optional<OmegaCoords> to_omega(const FieldElement& x) {
  if (x.d() % 4 == 1) {
    Rational q = 2 * x.b();
    Rational p = x.a() - x.b();
    if (!detail::is_integer(p) || !detail::is_integer(q)) return std::nullopt;
    return OmegaCoords{p.get_num(), q.get_num()};
  }
  if (!detail::is_integer(x.a()) || !detail::is_integer(x.b())) return std::nullopt;
  return OmegaCoords{x.a().get_num(), x.b().get_num()};
}

inline FieldElement from_omega(long d, const BigInt& p, const BigInt& q) {
  FieldElement w = FieldElement::omega(d);
  return FieldElement(d, Rational(p) + Rational(q) * w.a(), Rational(q) * w.b());
}

// Exact square root in K, if one exists; the root returned is >= 0.  For a
// nonzero square both roots lie in K, and every usage here wants the positive
// one.
inline std::optional<FieldElement> sqrt_in_K(const FieldElement& x) {
  const long d = x.d();
  int s = x.sign();
  if (s < 0) return std::nullopt;
  if (s == 0) return FieldElement::zero(d);
  if (x.is_rational()) {
    if (auto r = detail::sqrt_rational(x.a())) return FieldElement(d, *r, Rational(0));
    if (auto r = detail::sqrt_rational(x.a() / d)) return FieldElement(d, Rational(0), *r);
    return std::nullopt;
  }
  // (p + q sqrt(d))^2 = x forces p^2 + d q^2 = a and 2pq = b, which makes
  // p^2 a root of t^2 - a t + d b^2/4; that quadratic has rational roots
  // exactly when norm(x) is a rational square.
  auto r = detail::sqrt_rational(x.norm());
  if (!r) return std::nullopt;
  for (const Rational& t : {Rational((x.a() + *r) / 2), Rational((x.a() - *r) / 2)}) {
    auto p = detail::sqrt_rational(t);
    if (!p || sgn(*p) == 0) continue;
    Rational q = x.b() / (2 * *p);
    FieldElement cand(d, *p, q);
    if (cand * cand == x) return cand.sign() > 0 ? cand : -cand;
  }
  return std::nullopt;
}

// Smallest rational integer >= x, computed exactly (binary search against the
// exact order; no floating point involved).
inline BigInt ceil_field(const FieldElement& x) {
  if (x.is_rational()) {
    BigInt c;
    mpz_cdiv_q(c.get_mpz_t(), x.a().get_num().get_mpz_t(), x.a().get_den().get_mpz_t());
    return c;
  }
  // |b sqrt(d)| <= |b| (isqrt(d)+1) gives integer bounds around x.
  BigInt root_bound;
  mpz_sqrt(root_bound.get_mpz_t(), BigInt(x.d()).get_mpz_t());
  root_bound += 1;
  Rational spread = abs(x.b()) * root_bound + 1;
  Rational alo = x.a() - spread, ahi = x.a() + spread;
  BigInt lo, hi;
  mpz_fdiv_q(lo.get_mpz_t(), alo.get_num().get_mpz_t(), alo.get_den().get_mpz_t());
  mpz_cdiv_q(hi.get_mpz_t(), ahi.get_num().get_mpz_t(), ahi.get_den().get_mpz_t());
  // Invariant: FE(lo) < x <= FE(hi) is not guaranteed for lo yet; widen once.
  while (compare(FieldElement::rational(x.d(), Rational(hi)), x) < 0) hi += 1;
  while (compare(FieldElement::rational(x.d(), Rational(lo)), x) >= 0) lo -= 1;
  while (hi - lo > 1) {
    BigInt mid = (lo + hi) / 2;
    if (compare(FieldElement::rational(x.d(), Rational(mid)), x) >= 0)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

inline BigInt floor_field(const FieldElement& x) { return -ceil_field(-x); }

// Principal ideal (beta) of the ring of integers, beta != 0 integral.  The
// constructor puts the rank-2 lattice Z beta + Z beta*omega into row Hermite
// form over the omega-basis; that normal form drives canonical residue
// reduction and the residue count.
class IdealGen {
 public:
  explicit IdealGen(FieldElement beta) : gen_(std::move(beta)) {
    if (gen_.is_zero()) throw DomainError("ideal generator must be nonzero");
    if (!gen_.is_integral()) throw DomainError("ideal generator must be integral");
    auto r1 = to_omega(gen_);
    auto r2 = to_omega(gen_ * FieldElement::omega(gen_.d()));
    if (!r1 || !r2) throw InvariantError("integral generator without omega coordinates");
    BigInt x, y;
    mpz_gcdext(h00_.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t(), r1->p.get_mpz_t(), r2->p.get_mpz_t());
    if (sgn(h00_) <= 0) throw InvariantError("degenerate ideal lattice");
    BigInt det = r1->p * r2->q - r2->p * r1->q;
    abs_norm_ = abs(det);
    BigInt rem;
    mpz_fdiv_qr(h11_.get_mpz_t(), rem.get_mpz_t(), abs_norm_.get_mpz_t(), h00_.get_mpz_t());
    if (sgn(rem) != 0) throw InvariantError("ideal lattice determinant not divisible by pivot");
    BigInt q1 = x * r1->q + y * r2->q;
    mpz_fdiv_r(h01_.get_mpz_t(), q1.get_mpz_t(), h11_.get_mpz_t());
    // Cross-check the two routes to the residue count: lattice determinant
    // versus |norm| of the generator.
    Rational n = gen_.norm();
    if (!detail::is_integer(n) || abs(n.get_num()) != abs_norm_)
      throw InvariantError("ideal lattice determinant disagrees with |norm(beta)|");
  }

  const FieldElement& generator() const { return gen_; }
  long d() const { return gen_.d(); }

  // |N(beta)| = number of residue classes.
  const BigInt& abs_norm() const { return abs_norm_; }

  // Membership x in (beta), decided by exact division.
  bool contains(const FieldElement& x) const { return (x / gen_).is_integral(); }

  // Canonical coordinates: p reduced into [0, h00), then q into [0, h11).
  OmegaCoords reduce(const OmegaCoords& c) const {
    BigInt t, p;
    mpz_fdiv_qr(t.get_mpz_t(), p.get_mpz_t(), c.p.get_mpz_t(), h00_.get_mpz_t());
    BigInt q1 = c.q - t * h01_;
    BigInt q;
    mpz_fdiv_r(q.get_mpz_t(), q1.get_mpz_t(), h11_.get_mpz_t());
    return OmegaCoords{p, q};
  }

  friend bool operator==(const IdealGen& a, const IdealGen& b) {
    return a.gen_ == b.gen_;
  }

 private:
  FieldElement gen_;
  BigInt h00_, h01_, h11_;  // row HNF [[h00, h01], [0, h11]] in omega-coords
  BigInt abs_norm_;
};

// Equality of ideals: mutual membership of the generators.
inline bool ideal_equal(const IdealGen& a, const IdealGen& b) {
  if (a.d() != b.d()) throw DomainError("comparing ideals of different fields");
  return a.contains(b.generator()) && b.contains(a.generator());
}

inline BigInt residue_ring_size(const IdealGen& ideal) { return ideal.abs_norm(); }

// A residue class modulo a principal ideal, stored by its canonical
// representative.  Two residues compare equal exactly when the difference of
// any representatives lies in the ideal.
class Residue {
 public:
  Residue(FieldElement rep, IdealGen mod) : rep_(std::move(rep)), mod_(std::move(mod)) {}

  const FieldElement& representative() const { return rep_; }
  const IdealGen& modulus() const { return mod_; }
  bool is_zero() const { return rep_.is_zero(); }

  friend bool operator==(const Residue& x, const Residue& y) {
    if (!(x.mod_ == y.mod_)) throw DomainError("comparing residues with different moduli");
    return x.rep_ == y.rep_;
  }

 private:
  FieldElement rep_;  // canonical
  IdealGen mod_;
};

inline Residue reduce_mod(const FieldElement& x, const IdealGen& ideal) {
  if (x.d() != ideal.d()) throw DomainError("reducing an element of a different field");
  auto coords = to_omega(x);
  if (!coords) throw DomainError("reduce_mod requires an integral element");
  OmegaCoords r = ideal.reduce(*coords);
  return Residue(from_omega(x.d(), r.p, r.q), ideal);
}

// ---- text encoding ---------------------------------------------------------
//
// Canonical form "a+b*sqrt(d)" with a, b rationals printed as "n" or "n/m";
// negative b prints as e.g. "4+-1*sqrt(5)".  Pure rationals round-trip as
// plain rational strings.

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline std::string to_string(const FieldElement& x) {
  return x.a().get_str() + "+" + x.b().get_str() + "*sqrt(" + std::to_string(x.d()) + ")";
}

namespace detail {

inline Rational parse_rational(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) throw DomainError("empty rational literal");
  Rational r;
  if (mpq_set_str(r.get_mpq_t(), std::string(s).c_str(), 10) != 0)
    throw DomainError("bad rational literal '" + std::string(s) + "'");
  if (sgn(Rational(r.get_den())) == 0) throw DomainError("rational literal with zero denominator");
  r.canonicalize();
  return r;
}

inline std::string strip_space(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  return out;
}

}  // namespace detail

inline Rational parse_rational(std::string_view s) {
  return detail::parse_rational(detail::strip_space(s));
}

// Parse "a+b*sqrt(d)", "b*sqrt(d)", or a bare rational ("a"), against an
// expected field parameter d.  A d embedded in the string must match.
inline FieldElement parse_element(std::string_view text, long d) {
  std::string s = detail::strip_space(text);
  if (s.empty()) throw DomainError("empty field element literal");
  auto star = s.find("*sqrt(");
  if (star == std::string::npos) {
    return FieldElement(d, detail::parse_rational(s), Rational(0));
  }
  auto close = s.find(')', star);
  if (close == std::string::npos || close + 1 != s.size())
    throw DomainError("malformed sqrt(...) in '" + s + "'");
  std::string d_str = s.substr(star + 6, close - star - 6);
  char* end = nullptr;
  long embedded = std::strtol(d_str.c_str(), &end, 10);
  if (end == d_str.c_str() || *end != '\0')
    throw DomainError("bad field parameter '" + d_str + "'");
  if (embedded != d)
    throw DomainError("field parameter mismatch: expected sqrt(" + std::to_string(d) +
                      "), got sqrt(" + std::to_string(embedded) + ")");
  std::string head = s.substr(0, star);
  // Split "a+b"; the separating '+' is the last one (b may begin with '-').
  // "a-b*sqrt(d)" is accepted too, splitting at the last '-' past position 0.
  auto plus = head.rfind('+');
  if (plus != std::string::npos && plus > 0) {
    return FieldElement(d, detail::parse_rational(head.substr(0, plus)),
                        detail::parse_rational(head.substr(plus + 1)));
  }
  auto minus = head.rfind('-');
  if (minus != std::string::npos && minus > 0) {
    return FieldElement(d, detail::parse_rational(head.substr(0, minus)),
                        detail::parse_rational(head.substr(minus)));
  }
  // No additive part: pure b*sqrt(d).  (A leading sign is consumed by the
  // rational parser.)
  return FieldElement(d, Rational(0), detail::parse_rational(head));
}

}  // namespace systolic
