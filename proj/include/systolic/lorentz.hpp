#pragma once

// Lorentzian K-quadratic spaces and hyperplanes of the hyperboloid model.
//
// A QuadSpace wraps a symmetric Gram matrix F over K = Q(sqrt(d)) after
// certifying, by exact congruence diagonalization, that F has signature
// (n, 1) at the defining embedding and that the conjugate form is positive
// definite (the admissibility condition that makes the lattice cocompact).
// Hyperplanes are spacelike normal vectors up to scale; disjointness /
// tangency / transversality of two hyperplanes is decided by exactly
// comparing (e0,e1)^2 with (e0,e0)(e1,e1), which keeps every decision inside
// K even though the underlying inequality involves a square root.

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "systolic/errors.hpp"
#include "systolic/interval.hpp"
#include "systolic/matrix.hpp"
#include "systolic/numberfield.hpp"

namespace systolic {

enum class PairClass { Intersect, TangentAtInfinity, Ultraparallel, Equal };

inline const char* to_cstring(PairClass c) {
  switch (c) {
    case PairClass::Intersect: return "Intersect";
    case PairClass::TangentAtInfinity: return "TangentAtInfinity";
    case PairClass::Ultraparallel: return "Ultraparallel";
    case PairClass::Equal: return "Equal";
  }
  throw InvariantError("unknown PairClass value");
}

inline KMatrix conjugate_entrywise(const KMatrix& m) {
  KMatrix out(m.rows(), m.cols(), m.d());
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) out.at(r, c) = m.at(r, c).conjugate();
  return out;
}

inline KVector conjugate_entrywise(const KVector& v) {
  KVector out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(x.conjugate());
  return out;
}

// Result of an exact symmetric congruence reduction P^T F P = diag(entries).
struct Diagonalization {
  std::vector<FieldElement> diagonal;
  KMatrix transform;  // P, invertible
  int positives = 0, negatives = 0, zeros = 0;
};

// Deterministic congruence diagonalization: at each step take the first
// nonzero diagonal pivot; if the whole trailing diagonal vanishes, add one
// column (and row) into another to create a nonzero diagonal entry first.
inline Diagonalization diagonalize_symmetric(const KMatrix& F) {
  if (F.rows() != F.cols()) throw DomainError("diagonalizing a non-square matrix");
  if (!F.is_symmetric()) throw DomainError("diagonalizing a non-symmetric matrix");
  const int m = F.rows();
  const long d = F.d();
  KMatrix a(F);
  KMatrix p = KMatrix::identity(m, d);

  auto swap_basis = [&](int r, int c) {
    // exchange basis vectors r and c: congruence by a permutation
    a.swap_rows(r, c);
    for (int k = 0; k < m; ++k) std::swap(a.at(k, r), a.at(k, c));
    for (int k = 0; k < m; ++k) std::swap(p.at(k, r), p.at(k, c));
  };
  auto add_basis = [&](int dst, int src, const FieldElement& f) {
    // basis change b_dst += f * b_src: col dst += f * col src, same for rows
    for (int k = 0; k < m; ++k) a.at(k, dst) = a.at(k, dst) + f * a.at(k, src);
    for (int k = 0; k < m; ++k) a.at(dst, k) = a.at(dst, k) + f * a.at(src, k);
    for (int k = 0; k < m; ++k) p.at(k, dst) = p.at(k, dst) + f * p.at(k, src);
  };

  for (int k = 0; k < m; ++k) {
    if (a.at(k, k).is_zero()) {
      int pivot = -1;
      for (int j = k + 1; j < m; ++j)
        if (!a.at(j, j).is_zero()) {
          pivot = j;
          break;
        }
      if (pivot >= 0) {
        swap_basis(k, pivot);
      } else {
        // whole trailing diagonal is zero; find any nonzero off-diagonal
        int rr = -1, cc = -1;
        for (int r = k; r < m && rr < 0; ++r)
          for (int c = r + 1; c < m; ++c)
            if (!a.at(r, c).is_zero()) {
              rr = r;
              cc = c;
              break;
            }
        if (rr < 0) break;  // trailing block identically zero
        add_basis(rr, cc, FieldElement::one(d));  // a(rr,rr) becomes 2*a(rr,cc)
        if (rr != k) swap_basis(k, rr);
      }
    }
    const FieldElement piv = a.at(k, k);
    for (int j = k + 1; j < m; ++j) {
      if (a.at(k, j).is_zero()) continue;
      add_basis(j, k, -(a.at(k, j) / piv));
    }
  }

  Diagonalization out{{}, p, 0, 0, 0};
  out.diagonal.reserve(m);
  for (int k = 0; k < m; ++k) {
    out.diagonal.push_back(a.at(k, k));
    int s = a.at(k, k).sign();
    if (s > 0)
      ++out.positives;
    else if (s < 0)
      ++out.negatives;
    else
      ++out.zeros;
  }
  return out;
}

inline FieldElement inner_with_form(const KMatrix& F, const KVector& u, const KVector& v) {
  if (static_cast<int>(u.size()) != F.rows() || static_cast<int>(v.size()) != F.cols())
    throw DomainError("inner product dimension mismatch");
  FieldElement s = FieldElement::zero(F.d());
  for (int r = 0; r < F.rows(); ++r) {
    if (u[r].is_zero()) continue;
    FieldElement row = FieldElement::zero(F.d());
    for (int c = 0; c < F.cols(); ++c) row = row + F.at(r, c) * v[c];
    s = s + u[r] * row;
  }
  return s;
}

// A certified ambient space for H^n: Gram matrix of signature (n,1) whose
// Galois conjugate is positive definite.
class QuadSpace {
 public:
  // Certify F or reject with a DomainError naming the computed signature.
  static std::shared_ptr<const QuadSpace> certify(const KMatrix& F) {
    if (F.rows() != F.cols()) throw DomainError("form matrix must be square");
    if (F.rows() < 3) throw DomainError("need n >= 2, i.e. a form of size >= 3");
    if (!F.is_symmetric()) throw DomainError("form matrix must be symmetric");
    const int n = F.rows() - 1;

    Diagonalization d1 = diagonalize_symmetric(F);
    if (d1.zeros > 0)
      throw DomainError("form is singular at sigma1 (" + std::to_string(d1.zeros) +
                        " zero diagonal entries)");
    if (!(d1.positives == n && d1.negatives == 1))
      throw DomainError("signature (" + std::to_string(d1.positives) + "," +
                        std::to_string(d1.negatives) + ") at sigma1, expected (" +
                        std::to_string(n) + ",1)");

    Diagonalization d2 = diagonalize_symmetric(conjugate_entrywise(F));
    if (d2.negatives > 0 || d2.zeros > 0)
      throw DomainError("conjugate form not positive definite: signature (" +
                        std::to_string(d2.positives) + "," + std::to_string(d2.negatives) +
                        ") at sigma2");

    // Timelike reference vector for sheet tests: the first basis vector when
    // it is already timelike, else the diagonalizing image of the negative
    // direction.
    KVector witness;
    if (F.at(0, 0).sign() < 0) {
      witness = KVector(static_cast<std::size_t>(n) + 1, FieldElement::zero(F.d()));
      witness[0] = FieldElement::one(F.d());
    } else {
      int neg = -1;
      for (int k = 0; k <= n; ++k)
        if (d1.diagonal[k].sign() < 0) {
          neg = k;
          break;
        }
      witness = d1.transform.column(neg);
    }
    FieldElement check = inner_with_form(F, witness, witness);
    if (check.sign() >= 0) throw InvariantError("certified witness is not timelike");

    return std::shared_ptr<const QuadSpace>(new QuadSpace(F, n, std::move(witness)));
  }

  // The family form diag(-sqrt(d), 1, ..., 1) on K^{n+1}.
  static std::shared_ptr<const QuadSpace> family_form(int n, long d) {
    if (n < 2) throw DomainError("family form needs n >= 2");
    KMatrix F(n + 1, n + 1, d);
    F.at(0, 0) = -FieldElement::sqrt_d(d);
    for (int k = 1; k <= n; ++k) F.at(k, k) = FieldElement::one(d);
    return certify(F);
  }

  const KMatrix& gram() const { return form_; }
  int dim() const { return n_; }  // hyperbolic dimension n
  long d() const { return form_.d(); }
  const KVector& timelike_witness() const { return witness_; }

  bool is_family_form() const {
    const KMatrix f = family_matrix(n_, d());
    return form_ == f;
  }

  friend bool operator==(const QuadSpace& a, const QuadSpace& b) { return a.form_ == b.form_; }

 private:
  static KMatrix family_matrix(int n, long d) {
    KMatrix F(n + 1, n + 1, d);
    F.at(0, 0) = -FieldElement::sqrt_d(d);
    for (int k = 1; k <= n; ++k) F.at(k, k) = FieldElement::one(d);
    return F;
  }

  QuadSpace(KMatrix F, int n, KVector witness)
      : form_(std::move(F)), n_(n), witness_(std::move(witness)) {}

  KMatrix form_;
  int n_;
  KVector witness_;
};

using SpacePtr = std::shared_ptr<const QuadSpace>;

inline FieldElement inner(const SpacePtr& space, const KVector& u, const KVector& v) {
  return inner_with_form(space->gram(), u, v);
}

// A totally geodesic hyperplane, represented by a spacelike normal vector.
class Hyperplane {
 public:
  Hyperplane(SpacePtr space, KVector normal)
      : space_(std::move(space)), normal_(std::move(normal)) {
    if (!space_) throw DomainError("hyperplane needs an ambient space");
    if (static_cast<int>(normal_.size()) != space_->dim() + 1)
      throw DomainError("hyperplane normal has wrong length");
    if (inner_with_form(space_->gram(), normal_, normal_).sign() <= 0)
      throw DomainError("hyperplane normal must be spacelike ((e,e) > 0)");
  }

  const KVector& normal() const { return normal_; }
  const SpacePtr& space() const { return space_; }

 private:
  SpacePtr space_;
  KVector normal_;
};

namespace detail {

inline void require_same_space(const Hyperplane& h0, const Hyperplane& h1) {
  if (!(h0.space() == h1.space() || *h0.space() == *h1.space()))
    throw DomainError("hyperplanes live in different ambient spaces");
}

inline bool proportional_over_K(const KVector& u, const KVector& v) {
  std::size_t j = 0;
  while (j < u.size() && u[j].is_zero()) ++j;
  if (j == u.size()) throw InvariantError("zero vector reached proportionality test");
  if (v[j].is_zero()) return false;
  FieldElement lambda = v[j] / u[j];
  for (std::size_t k = 0; k < u.size(); ++k)
    if (!(v[k] == lambda * u[k])) return false;
  return true;
}

}  // namespace detail

// Trichotomy of Eq. (3.3) with the square root removed by squaring:
// (e0,e1)^2 < (e0,e0)(e1,e1)  -> transversal intersection
// (e0,e1)^2 > (e0,e0)(e1,e1)  -> disjoint with common perpendicular
// equality                     -> same hyperplane or tangent at infinity
inline PairClass classify_pair(const Hyperplane& h0, const Hyperplane& h1) {
  detail::require_same_space(h0, h1);
  const SpacePtr& s = h0.space();
  FieldElement g01 = inner(s, h0.normal(), h1.normal());
  FieldElement g00 = inner(s, h0.normal(), h0.normal());
  FieldElement g11 = inner(s, h1.normal(), h1.normal());
  int cmp_sign = (g01 * g01 - g00 * g11).sign();
  if (cmp_sign < 0) return PairClass::Intersect;
  if (cmp_sign > 0) return PairClass::Ultraparallel;
  return detail::proportional_over_K(h0.normal(), h1.normal()) ? PairClass::Equal
                                                               : PairClass::TangentAtInfinity;
}

// cosh^2 of the distance between ultraparallel hyperplanes, exact in K.
inline FieldElement cosh_sq_distance(const Hyperplane& h0, const Hyperplane& h1) {
  if (classify_pair(h0, h1) != PairClass::Ultraparallel)
    throw DomainError("distance requires an ultraparallel pair");
  const SpacePtr& s = h0.space();
  FieldElement g01 = inner(s, h0.normal(), h1.normal());
  FieldElement g00 = inner(s, h0.normal(), h0.normal());
  FieldElement g11 = inner(s, h1.normal(), h1.normal());
  return (g01 * g01) / (g00 * g11);
}

// cosh of the distance as an element of K, when the square root stays in K.
inline std::optional<FieldElement> cosh_distance_exact(const Hyperplane& h0, const Hyperplane& h1) {
  return sqrt_in_K(cosh_sq_distance(h0, h1));
}

// Certified enclosure of the distance rho = arccosh(|(e0,e1)|/(||e0|| ||e1||)).
inline RealInterval distance(const Hyperplane& h0, const Hyperplane& h1, mpfr_prec_t precision) {
  FieldElement csq = cosh_sq_distance(h0, h1);
  return RealInterval::from_field(csq, precision).sqrt().acosh();
}

// The integral vector pair of the coincidence case of the separation lemma:
// e0' = sqrt((e0,e0)(e1,e1)) e0 and e1' = (e0,e0) e1.  Returns nothing when
// the square root leaves K, which makes the coincidence case impossible and
// no guard necessary.
struct CoincidencePair {
  KVector scaled0, scaled1;
};

inline std::optional<CoincidencePair> coincidence_vectors(const KVector& e0, const KVector& e1,
                                                          const SpacePtr& space) {
  if (!all_integral(e0) || !all_integral(e1))
    throw DomainError("coincidence vectors require integral inputs");
  FieldElement g00 = inner(space, e0, e0);
  FieldElement g11 = inner(space, e1, e1);
  if (!(g00 * g11).is_integral())
    throw DomainError("coincidence vectors require an integral Gram pair");
  auto root = sqrt_in_K(g00 * g11);
  if (!root) return std::nullopt;
  CoincidencePair out{scale(*root, e0), scale(g00, e1)};
  // root is integral (a root of the monic t^2 - g00*g11 with integral
  // constant term), so both vectors must come out integral.
  if (!all_integral(out.scaled0) || !all_integral(out.scaled1))
    throw InvariantError("coincidence vectors failed integrality");
  return out;
}

}  // namespace systolic
