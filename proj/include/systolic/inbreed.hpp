#pragma once

// The end-to-end construction: a pair of close ultraparallel hyperplanes over
// K = Q(sqrt(d)), the separation constant C, the congruence ideals whose
// subgroup keeps the images of one hyperplane away from the other, the
// coincidence guard, and the certified systole / index-growth figures.  Also
// the desk-scale verification harness that brute-forces every bounded-height
// integral isometry and checks the separation dichotomy both ways.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "systolic/arithgroup.hpp"
#include "systolic/errors.hpp"
#include "systolic/interval.hpp"
#include "systolic/lorentz.hpp"
#include "systolic/matrix.hpp"
#include "systolic/numberfield.hpp"

namespace systolic {

struct ConstructionInput {
  int n = 2;                  // hyperbolic dimension, >= 2
  long d = 5;                 // field parameter, squarefree >= 2
  long i = 2;                 // family parameter, >= 2 and i^4 > d
  mpfr_prec_t precision = 128;
};

enum class GuardOutcome { StrictSeparation, GuardChecked, CaseAImpossible };

inline const char* to_cstring(GuardOutcome g) {
  switch (g) {
    case GuardOutcome::StrictSeparation: return "StrictSeparation";
    case GuardOutcome::GuardChecked: return "GuardChecked";
    case GuardOutcome::CaseAImpossible: return "CaseAImpossible";
  }
  throw InvariantError("unknown GuardOutcome value");
}

// The hyperplane pair of the family: e0 = (0,...,0, i^2 - sqrt(d)) and
// e1 = (-2i, 0,...,0, i^2 + sqrt(d)), which is the boosted image of e0
// rescaled to integral coordinates.  The closed-form Gram values are
// recomputed and asserted on every call.
inline std::pair<KVector, KVector> make_vectors(long i, const SpacePtr& space) {
  if (i < 2) throw DomainError("family parameter must be >= 2");
  if (!space->is_family_form())
    throw DomainError("family vectors are defined on the form diag(-sqrt(d),1,...,1)");
  const long d = space->d();
  const int n = space->dim();
  FieldElement isq = FieldElement::integer(d, i * i);
  FieldElement sd = FieldElement::sqrt_d(d);
  if ((isq - sd).sign() <= 0)
    throw DomainError("family parameter too small for d: need i^2 > sqrt(d)");

  KVector e0(static_cast<std::size_t>(n) + 1, FieldElement::zero(d));
  KVector e1(static_cast<std::size_t>(n) + 1, FieldElement::zero(d));
  e0[n] = isq - sd;
  e1[0] = FieldElement::integer(d, -2 * i);
  e1[n] = isq + sd;

  FieldElement g01 = inner(space, e0, e1);
  FieldElement g00 = inner(space, e0, e0);
  FieldElement g11 = inner(space, e1, e1);
  FieldElement len = (isq - sd) * (isq - sd);
  FieldElement len_conj = (isq + sd) * (isq + sd);
  bool ok = g01 == isq * isq - FieldElement::integer(d, d) && g00 == len && g11 == len &&
            g00.conjugate() == len_conj && g11.conjugate() == len_conj;
  if (!ok) throw InvariantError("family Gram values deviate from their closed forms");
  return {std::move(e0), std::move(e1)};
}

struct SeparationConstant {
  long C;
  const char* rule;  // "emptyProduct" | "normRoute" | "productCeiling"
};

// Minimal admissible integer C > 1 for the separation ideal (beta) with
// beta = 2C(e0,e1).
//
// The conjugate-embedding factor t = (e0,e0)^s (e1,e1)^s / ((e0,e1)^s)^2
// (s = Galois conjugation) controls the fractional-offset case of the
// separation argument.  Three regimes:
//   - t <= 1: the factor set is empty, the constraint degenerates to C > 1.
//   - N((e0,e1))^2 >= N((e0,e0)) N((e1,e1)): norm multiplicativity already
//     gives |(h e0, e1)| >= sqrt((e0,e0)(e1,e1)) for any congruence member
//     with offset 0 < |alpha| < 1, independent of C — because
//     |N(1 + 2C alpha)| >= 1 and Cauchy-Schwarz at the positive-definite
//     conjugate embedding bound |1 + 2C alpha|^s from above.  The remaining
//     offset cases need only C > 1, so C = 2.
//   - otherwise: C = ceil(t), the general product bound.
inline SeparationConstant choose_separation_constant(const KVector& e0, const KVector& e1,
                                                     const SpacePtr& space) {
  if (!all_integral(e0) || !all_integral(e1))
    throw DomainError("separation constant requires integral vectors");
  Hyperplane h0(space, e0), h1(space, e1);
  if (classify_pair(h0, h1) != PairClass::Ultraparallel)
    throw DomainError("separation constant requires an ultraparallel pair");
  FieldElement g00 = inner(space, e0, e0);
  FieldElement g01 = inner(space, e0, e1);
  FieldElement g11 = inner(space, e1, e1);
  FieldElement num = g00.conjugate() * g11.conjugate();
  FieldElement den = g01.conjugate() * g01.conjugate();
  if (num.sign() <= 0 || den.sign() <= 0)
    throw InvariantError("conjugate Gram data lost positivity");
  if (compare(num, den) <= 0) return {2, "emptyProduct"};
  Rational n01 = g01.norm() * g01.norm();
  if (cmp(n01, g00.norm() * g11.norm()) >= 0) return {2, "normRoute"};
  BigInt c = ceil_field(num / den);
  if (c < 2) c = 2;
  if (!c.fits_slong_p()) throw DomainError("separation constant overflows");
  return {c.get_si(), "productCeiling"};
}

struct ConstructionIdeals {
  IdealGen beta;       // (2C(e0,e1)) — the working congruence ideal
  IdealGen beta_self;  // (2(e0,e0))  — the self-ideal that also suffices
  IdealGen beta_alt;   // (2C(e0,e0)) — the alternate normalization
  bool swapped_ideal_equal;    // (2C(e0,e0)) = (2C(e1,e1)) as ideals
  bool alt_ideal_equals_beta;  // (2C(e0,e0)) = (2C(e0,e1)) as ideals
};

inline ConstructionIdeals build_ideals(const KVector& e0, const KVector& e1, long C,
                                       const SpacePtr& space) {
  if (C < 2) throw DomainError("separation constant must be > 1");
  FieldElement g01 = inner(space, e0, e1);
  if (g01.is_zero())
    throw DomainError("hyperplanes are orthogonal: (e0,e1) = 0 admits no separation ideal");
  FieldElement g00 = inner(space, e0, e0);
  FieldElement g11 = inner(space, e1, e1);
  const long d = space->d();
  FieldElement twoC = FieldElement::integer(d, 2 * C);
  IdealGen beta(twoC * g01);
  IdealGen beta_self(FieldElement::integer(d, 2) * g00);
  IdealGen beta_alt(twoC * g00);
  IdealGen swapped(twoC * g11);
  return ConstructionIdeals{beta, beta_self, beta_alt, ideal_equal(beta_alt, swapped),
                            ideal_equal(beta_alt, beta)};
}

// The coincidence guard of the separation lemma.  A strictly ultraparallel
// pair needs no guard.  Otherwise the coincidence case would force
// h e0' = +-e1' with e0' = sqrt((e0,e0)(e1,e1)) e0 and e1' = (e0,e0) e1, so
// it suffices that neither e0'+e1' nor e0'-e1' is divisible by beta
// coordinatewise.  Returns nullopt when the guard fails, which signals that C
// must be enlarged (the retry policy lives in run_pipeline).
inline std::optional<GuardOutcome> coincidence_guard(const KVector& e0, const KVector& e1,
                                                     const SpacePtr& space, const IdealGen& beta,
                                                     PairClass pair_class,
                                                     bool force_check = false) {
  if (pair_class == PairClass::Ultraparallel && !force_check)
    return GuardOutcome::StrictSeparation;
  auto pair = coincidence_vectors(e0, e1, space);
  if (!pair) return GuardOutcome::CaseAImpossible;
  auto divisible = [&beta](const KVector& v) {
    for (const auto& x : v)
      if (!beta.contains(x)) return false;
    return true;
  };
  if (divisible(add(pair->scaled0, pair->scaled1)) ||
      divisible(sub(pair->scaled0, pair->scaled1)))
    return std::nullopt;
  return GuardOutcome::GuardChecked;
}

struct Systole {
  FieldElement cosh_half;  // cosh of half the systole, exact in K
  RealInterval length;     // certified enclosure of the systole itself
};

// The systole of the doubled construction: 2 rho, where rho is the distance
// between the pair, with cosh rho = (i^2 + sqrt(d))/(i^2 - sqrt(d)).
inline Systole systole_of(long i, long d, mpfr_prec_t precision) {
  if (i < 2) throw DomainError("family parameter must be >= 2");
  FieldElement isq = FieldElement::integer(d, i * i);
  FieldElement sd = FieldElement::sqrt_d(d);
  FieldElement den = isq - sd;
  if (den.sign() <= 0)
    throw DomainError("family parameter too small for d: need i^2 > sqrt(d)");
  FieldElement cosh_half = (isq + sd) / den;
  RealInterval rho = RealInterval::from_field(cosh_half, precision).acosh();
  return Systole{cosh_half, RealInterval::from_long(2, precision) * rho};
}

struct SeparationCertificate {
  PairClass pair_class;
  long C;
  std::string c_rule;
  FieldElement beta;       // generator of the working ideal
  FieldElement beta_self;  // generator of (2(e0,e0))
  FieldElement beta_alt;   // generator of (2C(e0,e0))
  GuardOutcome guard;
  bool swapped_ideal_equal;
  bool alt_ideal_equals_beta;
};

struct ConstructionReport {
  ConstructionInput input;
  KVector e0, e1;
  FieldElement g00, g01, g11;
  SeparationCertificate certificate;
  FieldElement cosh_distance;  // cosh of the hyperplane distance = cosh(systole/2)
  Systole systole;
  BigInt ideal_norm;           // |N(2C(e0,e1))|
  BigInt ideal_norm_alt;       // |N(2C(e0,e0))|
  BigInt index_bound;          // idealNorm^((n+1)^2)
  std::optional<int> lower_exponent;  // n-2, only for n >= 3
  long upper_degree;                  // 8(n+1)^2
};

namespace detail {

template <class F>
auto pipeline_stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace detail

inline ConstructionReport run_pipeline(const ConstructionInput& input) {
  if (input.n < 2) throw StageError("input", "dimension n must be >= 2");
  SpacePtr space = detail::pipeline_stage(
      "certify_form", [&] { return QuadSpace::family_form(input.n, input.d); });
  auto vectors =
      detail::pipeline_stage("make_vectors", [&] { return make_vectors(input.i, space); });
  const KVector& e0 = vectors.first;
  const KVector& e1 = vectors.second;

  PairClass pair_class = detail::pipeline_stage("classify_pair", [&] {
    return classify_pair(Hyperplane(space, e0), Hyperplane(space, e1));
  });
  if (pair_class != PairClass::Ultraparallel)
    throw StageError("classify_pair",
                     std::string("pair is ") + to_cstring(pair_class) + ", not Ultraparallel");

  SeparationConstant sep = detail::pipeline_stage(
      "choose_C", [&] { return choose_separation_constant(e0, e1, space); });

  long C = sep.C;
  std::optional<ConstructionIdeals> ideals;
  std::optional<GuardOutcome> guard;
  for (int attempt = 0;; ++attempt) {
    ideals = detail::pipeline_stage("build_ideals",
                                    [&] { return build_ideals(e0, e1, C, space); });
    guard = detail::pipeline_stage("coincidence_guard", [&] {
      return coincidence_guard(e0, e1, space, ideals->beta, pair_class);
    });
    if (guard) break;
    if (attempt >= 16)
      throw StageError("coincidence_guard",
                       "guard still failing after 16 doublings of C; construction aborted");
    C *= 2;
  }

  Systole sys = detail::pipeline_stage(
      "systole_of", [&] { return systole_of(input.i, input.d, input.precision); });

  return detail::pipeline_stage("report", [&] {
    FieldElement g00 = inner(space, e0, e0);
    FieldElement g01 = inner(space, e0, e1);
    FieldElement g11 = inner(space, e1, e1);
    Hyperplane h0(space, e0), h1(space, e1);
    auto cosh_rho = cosh_distance_exact(h0, h1);
    if (!cosh_rho || !(*cosh_rho == sys.cosh_half))
      throw InvariantError("pair distance disagrees with the closed-form systole");
    SeparationCertificate cert{pair_class,
                               C,
                               sep.rule,
                               ideals->beta.generator(),
                               ideals->beta_self.generator(),
                               ideals->beta_alt.generator(),
                               *guard,
                               ideals->swapped_ideal_equal,
                               ideals->alt_ideal_equals_beta};
    ConstructionReport report{input,
                              e0,
                              e1,
                              g00,
                              g01,
                              g11,
                              cert,
                              *cosh_rho,
                              sys,
                              ideals->beta.abs_norm(),
                              ideals->beta_alt.abs_norm(),
                              index_bound(ideals->beta, input.n),
                              input.n >= 3 ? std::optional<int>(input.n - 2) : std::nullopt,
                              8L * (input.n + 1) * (input.n + 1)};
    return report;
  });
}

// ---- desk-scale verification ----------------------------------------------

struct Counterexample {
  KMatrix matrix;
  std::string reason;
};

struct VerificationReport {
  ConstructionInput input;
  long bound = 0;
  long C = 0;
  FieldElement beta;       // generator of (2C(e0,e1))
  FieldElement beta_self;  // generator of (2(e0,e0))
  long enumerated = 0;
  long members = 0;
  long alpha_zero = 0;
  long alpha_unit_or_larger = 0;
  long alpha_subunit = 0;
  bool members_separated = true;
  bool violators_excluded = true;
  bool offsets_integral = true;
  bool offset_norms_ok = true;
  std::vector<Counterexample> counterexamples;

  bool passed() const { return counterexamples.empty(); }
};

// Brute-force check of the separation dichotomy over every integral isometry
// of height <= bound: congruence members (mod both ideals) must carry H0 to a
// hyperplane disjoint from H1 and disjoint-or-equal to H0; any isometry whose
// image of H0 meets H0 or H1 (or lands on H1) must fail a congruence test;
// offsets of members must be integral with |N(alpha)| >= 1 when nonzero.
inline VerificationReport verify_lemma_desk(const ConstructionInput& input, HeightBound bound,
                                            unsigned threads = 1) {
  SpacePtr space = QuadSpace::family_form(input.n, input.d);
  auto vectors = make_vectors(input.i, space);
  const KVector& e0 = vectors.first;
  const KVector& e1 = vectors.second;
  SeparationConstant sep = choose_separation_constant(e0, e1, space);
  ConstructionIdeals ideals = build_ideals(e0, e1, sep.C, space);
  Hyperplane h0(space, e0), h1(space, e1);

  VerificationReport report{input,
                            bound.value,
                            sep.C,
                            ideals.beta.generator(),
                            ideals.beta_self.generator()};

  FieldElement one = FieldElement::one(space->d());
  enumerate_integral_isometries(
      space, bound,
      [&](const Isometry& h) {
        ++report.enumerated;
        bool member =
            in_congruence(h, ideals.beta) && in_congruence(h, ideals.beta_self);
        Hyperplane image(space, h.apply(e0));
        PairClass vs_h0 = classify_pair(image, h0);
        PairClass vs_h1 = classify_pair(image, h1);
        bool violates = vs_h0 == PairClass::Intersect || vs_h0 == PairClass::TangentAtInfinity ||
                        vs_h1 == PairClass::Intersect || vs_h1 == PairClass::TangentAtInfinity ||
                        vs_h1 == PairClass::Equal;
        if (member) {
          ++report.members;
          if (vs_h1 != PairClass::Ultraparallel) {
            report.members_separated = false;
            report.counterexamples.push_back(
                {h.matrix(), std::string("congruence member image of H0 is ") +
                                 to_cstring(vs_h1) + " against H1"});
          }
          if (!(vs_h0 == PairClass::Equal || vs_h0 == PairClass::Ultraparallel)) {
            report.members_separated = false;
            report.counterexamples.push_back(
                {h.matrix(), std::string("congruence member image of H0 is ") +
                                 to_cstring(vs_h0) + " against H0"});
          }
          auto alpha = try_congruence_offset(h, e0, e1, ideals.beta);
          if (!alpha) {
            report.offsets_integral = false;
            report.counterexamples.push_back({h.matrix(), "member offset is not integral"});
          } else if (alpha->is_zero()) {
            ++report.alpha_zero;
          } else {
            if (compare_abs(*alpha, one) >= 0)
              ++report.alpha_unit_or_larger;
            else
              ++report.alpha_subunit;
            Rational n = alpha->norm();
            if (cmp(abs(n), Rational(1)) < 0) {
              report.offset_norms_ok = false;
              report.counterexamples.push_back(
                  {h.matrix(), "nonzero member offset with |N(alpha)| < 1"});
            }
          }
          if (violates) {
            report.violators_excluded = false;
            report.counterexamples.push_back(
                {h.matrix(), "separation violator passes both congruence tests"});
          }
        }
      },
      threads);
  return report;
}

// Smallest family parameter whose systole drops below the given target.
// Decided by certified intervals at escalating precision; the target is an
// exact rational, so ties cannot occur in practice (the systole values are
// transcendental-looking; if a tie resists 1024 bits we give up loudly).
inline long min_i_for_systole_below(const Rational& epsilon, long d) {
  if (sgn(epsilon) <= 0) throw DomainError("epsilon must be positive");
  auto below = [&](long i) {
    for (mpfr_prec_t prec = 128; prec <= 1024; prec *= 2) {
      Systole s = systole_of(i, d, prec);
      if (cmp(s.length.upper_rational(), epsilon) < 0) return true;
      if (cmp(s.length.lower_rational(), epsilon) >= 0) return false;
    }
    throw ArithmeticError("epsilon is indistinguishable from a systole value at 1024 bits");
  };
  const long cap = 1000000000L;
  long lo = 2;  // smallest i with i^4 > d, and at least 2
  while (BigInt(lo) * lo * lo * lo <= d) ++lo;
  if (below(lo)) return lo;
  long hi = 4;
  while (!below(hi)) {
    lo = hi;
    if (hi > cap / 2)
      throw DomainError("epsilon too small: family parameter search exceeded 10^9");
    hi *= 2;
  }
  while (hi - lo > 1) {
    long mid = lo + (hi - lo) / 2;
    if (below(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace systolic
