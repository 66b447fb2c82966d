#pragma once

// Integral isometries of the Lorentzian lattice: exact certification, the
// one-parameter boost family of the construction, congruence-subgroup
// membership modulo a principal ideal, the congruence offset identity, and
// deterministic brute-force enumeration of all integral isometries of bounded
// height (the desk-scale oracle used to verify the separation lemma).

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <future>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "systolic/errors.hpp"
#include "systolic/lorentz.hpp"
#include "systolic/matrix.hpp"
#include "systolic/numberfield.hpp"

namespace systolic {

// An element of the integral orthogonal group preserving the upper sheet.
// Instances only come out of verify_isometry, so holding one is a certificate.
class Isometry {
 public:
  const KMatrix& matrix() const { return m_; }
  const SpacePtr& space() const { return space_; }
  KVector apply(const KVector& v) const { return m_.apply(v); }
  bool is_integral() const { return m_.is_integral(); }

  friend bool operator==(const Isometry& a, const Isometry& b) { return a.m_ == b.m_; }

 private:
  Isometry(SpacePtr space, KMatrix m) : space_(std::move(space)), m_(std::move(m)) {}
  friend Isometry verify_isometry(const KMatrix&, const SpacePtr&);

  SpacePtr space_;
  KMatrix m_;
};

namespace detail {

enum class IsometryCheck { Ok, NotOrthogonal, SheetReversed };

struct IsometryFailure {
  IsometryCheck kind;
  int row = -1, col = -1;
  FieldElement got, expected;
};

inline std::optional<IsometryFailure> check_isometry(const KMatrix& g, const SpacePtr& space) {
  const KMatrix& F = space->gram();
  KMatrix t = g.transpose() * F * g;
  for (int r = 0; r < t.rows(); ++r)
    for (int c = 0; c < t.cols(); ++c)
      if (!(t.at(r, c) == F.at(r, c)))
        return IsometryFailure{IsometryCheck::NotOrthogonal, r, c, t.at(r, c), F.at(r, c)};
  const KVector& w = space->timelike_witness();
  if (inner_with_form(F, g.apply(w), w).sign() >= 0)
    return IsometryFailure{IsometryCheck::SheetReversed, -1, -1, FieldElement::zero(g.d()),
                           FieldElement::zero(g.d())};
  return std::nullopt;
}

}  // namespace detail

// Exact certification: g^T F g = F entrywise and preservation of the upper
// sheet, tested as (g w, w) < 0 for the space's fixed timelike witness w.
inline Isometry verify_isometry(const KMatrix& g, const SpacePtr& space) {
  if (!space) throw DomainError("isometry needs an ambient space");
  const int m = space->dim() + 1;
  if (g.rows() != m || g.cols() != m)
    throw DomainError("isometry matrix has wrong size for the space");
  if (g.d() != space->d()) throw DomainError("isometry matrix over the wrong field");
  if (auto fail = detail::check_isometry(g, space)) {
    if (fail->kind == detail::IsometryCheck::NotOrthogonal)
      throw DomainError("not an isometry: (g^T F g)[" + std::to_string(fail->row) + "][" +
                        std::to_string(fail->col) + "] = " + to_string(fail->got) +
                        ", expected " + to_string(fail->expected));
    throw DomainError("matrix reverses the two sheets of the hyperboloid");
  }
  return Isometry(space, g);
}

inline Isometry operator*(const Isometry& a, const Isometry& b) {
  if (!(a.space() == b.space() || *a.space() == *b.space()))
    throw DomainError("composing isometries of different spaces");
  return verify_isometry(a.matrix() * b.matrix(), a.space());
}

inline Isometry inverse(const Isometry& h) {
  return verify_isometry(h.matrix().inverse(), h.space());
}

// The boost A_i of the construction: a hyperbolic translation in the
// (x_0, x_n) coordinate plane with entries over i^2 - sqrt(d), defined on the
// diagonal family form.  Requires i >= 2 and i^4 > d (so the common
// denominator is positive).
inline Isometry boost_isometry(long i, const SpacePtr& space) {
  if (i < 2) throw DomainError("boost parameter must be >= 2");
  if (!space->is_family_form())
    throw DomainError("boost is defined on the family form diag(-sqrt(d),1,...,1)");
  const long d = space->d();
  const int n = space->dim();
  FieldElement isq = FieldElement::integer(d, i * i);
  FieldElement sd = FieldElement::sqrt_d(d);
  FieldElement den = isq - sd;
  if (den.sign() <= 0)
    throw DomainError("boost parameter too small for d: need i^2 > sqrt(d)");
  FieldElement diag = (isq + sd) / den;
  FieldElement corner01 = FieldElement::integer(d, -2 * i) / den;
  FieldElement corner10 = (FieldElement::integer(d, -2 * i) * sd) / den;
  KMatrix a = KMatrix::identity(n + 1, d);
  a.at(0, 0) = diag;
  a.at(n, n) = diag;
  a.at(0, n) = corner01;
  a.at(n, 0) = corner10;
  return verify_isometry(a, space);
}

// Entrywise congruence m = id (mod ideal); the raw-matrix form of the test.
inline bool entries_congruent_to_identity(const KMatrix& m, const IdealGen& ideal) {
  if (m.rows() != m.cols()) throw DomainError("congruence test requires a square matrix");
  if (m.d() != ideal.d()) throw DomainError("congruence test over the wrong field");
  if (!m.is_integral())
    throw DomainError("congruence is defined on integral matrices only");
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) {
      FieldElement diff = (r == c) ? m.at(r, c) - 1 : m.at(r, c);
      if (!ideal.contains(diff)) return false;
    }
  return true;
}

inline bool in_congruence(const Isometry& h, const IdealGen& ideal) {
  return entries_congruent_to_identity(h.matrix(), ideal);
}

// The offset alpha with (h e0, e1) = (e0, e1) + alpha * beta.  For integral
// data and h = id (mod beta) the offset is forced to be integral; a
// non-integral result after the membership test would falsify the identity,
// hence InvariantError.
inline std::optional<FieldElement> try_congruence_offset(const Isometry& h, const KVector& e0,
                                                         const KVector& e1,
                                                         const IdealGen& ideal) {
  if (!h.is_integral()) throw DomainError("offset requires an integral isometry");
  if (!all_integral(e0) || !all_integral(e1))
    throw DomainError("offset requires integral vectors");
  FieldElement diff =
      inner(h.space(), h.apply(e0), e1) - inner(h.space(), e0, e1);
  FieldElement alpha = diff / ideal.generator();
  if (!alpha.is_integral()) return std::nullopt;
  return alpha;
}

inline FieldElement congruence_offset(const Isometry& h, const KVector& e0, const KVector& e1,
                                      const IdealGen& ideal) {
  if (!h.space()->gram().is_integral())
    throw DomainError("offset identity requires an integral Gram matrix");
  if (!in_congruence(h, ideal))
    throw DomainError("offset requires a congruence-subgroup member");
  auto alpha = try_congruence_offset(h, e0, e1, ideal);
  if (!alpha)
    throw InvariantError("congruence member produced a non-integral offset");
  return *alpha;
}

// Largest |entry - identity| over all matrix positions, as an exact value.
inline FieldElement max_deviation_from_identity(const Isometry& h) {
  const KMatrix& m = h.matrix();
  FieldElement best = FieldElement::zero(m.d());
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) {
      FieldElement dev = ((r == c) ? m.at(r, c) - 1 : m.at(r, c)).abs();
      if (compare_abs(dev, best) > 0) best = dev;
    }
  return best;
}

// |N(beta)|^((n+1)^2): the order bound for the congruence quotient group.
inline BigInt index_bound(const IdealGen& ideal, int n) {
  if (n < 2) throw DomainError("index bound needs n >= 2");
  BigInt out;
  unsigned long e = static_cast<unsigned long>(n + 1) * static_cast<unsigned long>(n + 1);
  mpz_pow_ui(out.get_mpz_t(), ideal.abs_norm().get_mpz_t(), e);
  return out;
}

// Height bound for enumeration: entries p + q*omega with |p|, |q| <= B.
struct HeightBound {
  long value;
  explicit HeightBound(long b) : value(b) {
    if (b < 1) throw DomainError("height bound must be >= 1");
  }
};

namespace detail {

// omega-coordinate arithmetic on int64 for the enumeration fast path.
// omega^2 = c0 + c1*omega: (c0, c1) = ((d-1)/4, 1) for d = 1 mod 4, (d, 0)
// otherwise.
struct WElem {
  long long p = 0, q = 0;
  friend bool operator==(const WElem&, const WElem&) = default;
};

struct OmegaRing {
  long long c0, c1;
  explicit OmegaRing(long d)
      : c0(d % 4 == 1 ? (d - 1) / 4 : d), c1(d % 4 == 1 ? 1 : 0) {}
  WElem mul(const WElem& x, const WElem& y) const {
    return WElem{x.p * y.p + c0 * x.q * y.q, x.p * y.q + x.q * y.p + c1 * x.q * y.q};
  }
  WElem add(const WElem& x, const WElem& y) const { return WElem{x.p + y.p, x.q + y.q}; }
};

struct EnumContext {
  int m;                                  // matrix size n+1
  long d;
  OmegaRing ring;
  std::vector<std::vector<WElem>> fs;     // scaled integral form, m x m
  // buckets[j]: candidate columns v (flattened, stride m) with (v,v) = fs[j][j]
  std::vector<std::vector<WElem>> bucket_store;
  std::vector<int> bucket_of_column;

  WElem inner(const WElem* u, const WElem* w) const {
    WElem s{0, 0};
    for (int r = 0; r < m; ++r) {
      if (u[r].p == 0 && u[r].q == 0) continue;
      for (int c = 0; c < m; ++c) {
        const WElem& f = fs[r][c];
        if (f.p == 0 && f.q == 0) continue;
        s = ring.add(s, ring.mul(f, ring.mul(u[r], w[c])));
      }
    }
    return s;
  }
};

inline std::vector<std::vector<WElem>> scaled_integral_form(const KMatrix& F, BigInt& scale_out) {
  // Smallest convenient positive integer s with s*F having Z-coefficients on
  // {1, sqrt(d)}; such a matrix is integral and defines the same isometry
  // group.
  BigInt s(1);
  for (int r = 0; r < F.rows(); ++r)
    for (int c = 0; c < F.cols(); ++c) {
      mpz_lcm(s.get_mpz_t(), s.get_mpz_t(), F.at(r, c).a().get_den().get_mpz_t());
      mpz_lcm(s.get_mpz_t(), s.get_mpz_t(), F.at(r, c).b().get_den().get_mpz_t());
    }
  std::vector<std::vector<WElem>> out(F.rows(), std::vector<WElem>(F.cols()));
  Rational sq(s);
  for (int r = 0; r < F.rows(); ++r)
    for (int c = 0; c < F.cols(); ++c) {
      auto coords = to_omega(F.at(r, c) * sq);
      if (!coords) throw InvariantError("scaled form entry is not integral");
      if (!coords->p.fits_slong_p() || !coords->q.fits_slong_p())
        throw DomainError("form coefficients too large for the enumeration fast path");
      out[r][c] = WElem{coords->p.get_si(), coords->q.get_si()};
    }
  scale_out = s;
  return out;
}

inline void check_enumeration_budget(const EnumContext& ctx, long B) {
  long long maxf = 1;
  for (const auto& row : ctx.fs)
    for (const auto& e : row) {
      maxf = std::max(maxf, std::abs(e.p));
      maxf = std::max(maxf, std::abs(e.q));
    }
  // Coefficient growth bound for one summand f*u*w and the full m^2-term sum.
  long double kappa = static_cast<long double>(std::max(ctx.ring.c0 + 1, ctx.ring.c1 + 2));
  long double term = kappa * kappa * static_cast<long double>(maxf) * B * B;
  long double total = term * ctx.m * ctx.m;
  if (total > 4.0e18L)
    throw DomainError("height bound too large for the 64-bit enumeration path");
  long double cands = 1;
  for (int k = 0; k < 2 * ctx.m; ++k) cands *= (2.0L * B + 1);
  if (cands > 2.0e9L)
    throw DomainError("enumeration budget exceeded: (2B+1)^(2(n+1)) too large");
}

// Depth-first assembly of columns; buckets are pre-sorted in generation
// order, so emission order is lexicographic in the column-major coordinate
// tuple (p00, q00, p10, q10, ..., read column by column).
inline void enumerate_dfs(const EnumContext& ctx, int depth, std::vector<const WElem*>& chosen,
                          std::size_t first_lo, std::size_t first_hi,
                          const std::function<void(const std::vector<const WElem*>&)>& emit) {
  const int m = ctx.m;
  const auto& bucket = ctx.bucket_store[ctx.bucket_of_column[depth]];
  const std::size_t count = bucket.size() / m;
  const std::size_t lo = depth == 0 ? first_lo : 0;
  const std::size_t hi = depth == 0 ? first_hi : count;
  for (std::size_t idx = lo; idx < hi; ++idx) {
    const WElem* cand = bucket.data() + idx * m;
    bool ok = true;
    for (int k = 0; k < depth && ok; ++k)
      ok = ctx.inner(chosen[k], cand) == ctx.fs[k][depth];
    if (!ok) continue;
    chosen[depth] = cand;
    if (depth + 1 == m)
      emit(chosen);
    else
      enumerate_dfs(ctx, depth + 1, chosen, first_lo, first_hi, emit);
  }
  chosen[depth] = nullptr;
}

}  // namespace detail

// Enumerate every integral isometry with all omega-coordinates bounded by B,
// in a deterministic lexicographic order (column-major over (p, q) pairs).
// `threads` > 1 partitions the first-column candidates; the merged output is
// identical to the sequential stream.
inline void enumerate_integral_isometries(const SpacePtr& space, HeightBound bound,
                                          const std::function<void(const Isometry&)>& sink,
                                          unsigned threads = 1) {
  using detail::EnumContext;
  using detail::WElem;
  const int m = space->dim() + 1;
  const long B = bound.value;

  EnumContext ctx{m, space->d(), detail::OmegaRing(space->d()), {}, {}, {}};
  BigInt scale(1);
  ctx.fs = detail::scaled_integral_form(space->gram(), scale);
  detail::check_enumeration_budget(ctx, B);

  // Bucket the candidate columns by their required self-inner-product.  Equal
  // diagonal targets share one bucket.
  std::vector<WElem> targets;
  ctx.bucket_of_column.resize(m);
  for (int j = 0; j < m; ++j) {
    int found = -1;
    for (std::size_t t = 0; t < targets.size(); ++t)
      if (targets[t] == ctx.fs[j][j]) {
        found = static_cast<int>(t);
        break;
      }
    if (found < 0) {
      targets.push_back(ctx.fs[j][j]);
      found = static_cast<int>(targets.size()) - 1;
    }
    ctx.bucket_of_column[j] = found;
  }
  ctx.bucket_store.assign(targets.size(), {});

  // Stream all (2B+1)^(2m) candidate columns in lexicographic order and keep
  // the ones whose self-inner-product matches some diagonal target.
  {
    std::vector<long long> digits(static_cast<std::size_t>(2) * m, -B);
    std::vector<WElem> col(m);
    for (;;) {
      for (int j = 0; j < m; ++j) col[j] = WElem{digits[2 * j], digits[2 * j + 1]};
      WElem self = ctx.inner(col.data(), col.data());
      for (std::size_t t = 0; t < targets.size(); ++t)
        if (self == targets[t])
          ctx.bucket_store[t].insert(ctx.bucket_store[t].end(), col.begin(), col.end());
      int pos = 2 * m - 1;
      while (pos >= 0 && digits[pos] == B) digits[pos--] = -B;
      if (pos < 0) break;
      ++digits[pos];
    }
  }

  const auto& first_bucket = ctx.bucket_store[ctx.bucket_of_column[0]];
  const std::size_t first_count = first_bucket.size() / m;

  auto run_range = [&ctx, m](std::size_t lo, std::size_t hi) {
    std::vector<KMatrix> found;
    std::vector<const WElem*> chosen(m, nullptr);
    const long d = ctx.d;
    detail::enumerate_dfs(ctx, 0, chosen, lo, hi,
                          [&found, m, d](const std::vector<const WElem*>& cols) {
                            KMatrix g(m, m, d);
                            for (int c = 0; c < m; ++c)
                              for (int r = 0; r < m; ++r)
                                g.at(r, c) =
                                    from_omega(d, BigInt(static_cast<long>(cols[c][r].p)),
                                               BigInt(static_cast<long>(cols[c][r].q)));
                            found.push_back(std::move(g));
                          });
    return found;
  };

  std::vector<KMatrix> matrices;
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  unsigned t = std::min(threads == 0 ? 1u : threads, hw);
  if (t <= 1 || first_count < 2 * t) {
    matrices = run_range(0, first_count);
  } else {
    std::vector<std::future<std::vector<KMatrix>>> parts;
    std::size_t chunk = (first_count + t - 1) / t;
    for (std::size_t lo = 0; lo < first_count; lo += chunk) {
      std::size_t hi = std::min(lo + chunk, first_count);
      parts.push_back(std::async(std::launch::async, run_range, lo, hi));
    }
    for (auto& part : parts) {
      auto piece = part.get();
      matrices.insert(matrices.end(), std::make_move_iterator(piece.begin()),
                      std::make_move_iterator(piece.end()));
    }
  }

  // The int64 filter already certified g^T F g = F; re-verify exactly anyway
  // and drop sheet-reversing solutions (their negatives appear separately).
  for (const auto& g : matrices) {
    auto fail = detail::check_isometry(g, space);
    if (!fail) {
      sink(verify_isometry(g, space));
    } else if (fail->kind == detail::IsometryCheck::NotOrthogonal) {
      throw InvariantError("enumeration fast path disagrees with exact arithmetic");
    }
  }
}

inline std::vector<Isometry> enumerate_integral_isometries(const SpacePtr& space,
                                                           HeightBound bound,
                                                           unsigned threads = 1) {
  std::vector<Isometry> out;
  enumerate_integral_isometries(
      space, bound, [&out](const Isometry& h) { out.push_back(h); }, threads);
  return out;
}

}  // namespace systolic
