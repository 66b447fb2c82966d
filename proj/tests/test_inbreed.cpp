// The construction pipeline: family vectors, separation constant, congruence
// ideals, coincidence guard, systole, full reports, desk verification, and
// the inverse problem (minimal i below a systole target).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "systolic/inbreed.hpp"

using namespace systolic;

namespace {

FieldElement el5(long a, long b) { return FieldElement(5, Rational(a), Rational(b)); }

}  // namespace

TEST_CASE("family vectors and their Gram data") {
  SpacePtr space = QuadSpace::family_form(2, 5);
  auto [e0, e1] = make_vectors(2, space);

  REQUIRE(e0.size() == 3);
  CHECK(e0[0].is_zero());
  CHECK(e0[1].is_zero());
  CHECK(e0[2] == el5(4, -1));
  CHECK(e1[0] == el5(-4, 0));
  CHECK(e1[1].is_zero());
  CHECK(e1[2] == el5(4, 1));

  CHECK(inner(space, e0, e0) == el5(21, -8));   // (i^2 - sqrt5)^2
  CHECK(inner(space, e1, e1) == el5(21, -8));
  CHECK(inner(space, e0, e1) == el5(11, 0));    // i^4 - d

  SpacePtr tall = QuadSpace::family_form(5, 5);
  auto [t0, t1] = make_vectors(3, tall);
  REQUIRE(t0.size() == 6);
  CHECK(t0[5] == el5(9, -1));
  CHECK(t1[0] == el5(-6, 0));
  CHECK(inner(tall, t0, t1) == el5(76, 0));     // 3^4 - 5

  CHECK_THROWS_AS(make_vectors(1, space), DomainError);
  KMatrix twisted(3, 3, 5);
  twisted.at(0, 0) = -FieldElement::sqrt_d(5);
  twisted.at(1, 1) = FieldElement::one(5);
  twisted.at(2, 2) = FieldElement::integer(5, 2);
  CHECK_THROWS_AS(make_vectors(2, QuadSpace::certify(twisted)), DomainError);
}

TEST_CASE("separation constant: the family always takes the norm route") {
  for (long i : {2L, 3L, 4L, 5L, 6L, 25L}) {
    SpacePtr space = QuadSpace::family_form(2, 5);
    auto [e0, e1] = make_vectors(i, space);
    SeparationConstant c = choose_separation_constant(e0, e1, space);
    CHECK(c.C == 2);
    CHECK(std::string(c.rule) == "normRoute");
  }
}

TEST_CASE("separation constant: product ceiling on a lopsided pair") {
  SpacePtr space = QuadSpace::family_form(2, 5);
  KVector e0{el5(0, 0), el5(0, 0), el5(1, 0)};
  KVector e1{el5(1, 0), el5(0, 0), el5(2, 1)};
  // conj Gram: g00 = 1, g11 = 9 - 3 sqrt5, g01 = 2 - sqrt5;
  // t = (9 - 3 sqrt5)/(9 - 4 sqrt5) = 21 + 9 sqrt5 = 41.12..., so C = 42.
  SeparationConstant c = choose_separation_constant(e0, e1, space);
  CHECK(c.C == 42);
  CHECK(std::string(c.rule) == "productCeiling");

  // Intersecting pairs are refused.
  KVector a{el5(0, 0), el5(1, 0), el5(0, 0)};
  KVector b{el5(0, 0), el5(0, 0), el5(1, 0)};
  CHECK_THROWS_AS(choose_separation_constant(a, b, space), DomainError);
  // So are non-integral vectors.
  KVector frac{el5(0, 0), el5(0, 0), FieldElement::rational(5, Rational(1, 2))};
  auto [f0, f1] = make_vectors(2, space);
  CHECK_THROWS_AS(choose_separation_constant(frac, f1, space), DomainError);
}

TEST_CASE("congruence ideals at i = 2") {
  SpacePtr space = QuadSpace::family_form(2, 5);
  auto [e0, e1] = make_vectors(2, space);
  ConstructionIdeals ideals = build_ideals(e0, e1, 2, space);

  CHECK(ideals.beta.generator() == el5(44, 0));
  CHECK(ideals.beta_self.generator() == el5(42, -16));
  CHECK(ideals.beta_alt.generator() == el5(84, -32));
  CHECK(ideals.beta.abs_norm() == 1936);
  CHECK(ideals.beta_self.abs_norm() == 484);
  CHECK(ideals.beta_alt.abs_norm() == 1936);

  // Equal lengths make the swapped ideal trivially equal; the alternate
  // normalization has the same norm as beta yet is a different ideal.
  CHECK(ideals.swapped_ideal_equal);
  CHECK(ideals.alt_ideal_equals_beta == false);
  CHECK(ideal_equal(ideals.beta, ideals.beta_alt) == false);

  CHECK_THROWS_AS(build_ideals(e0, e1, 1, space), DomainError);
}

TEST_CASE("coincidence guard outcomes") {
  SpacePtr space = QuadSpace::family_form(2, 5);
  auto [e0, e1] = make_vectors(2, space);
  IdealGen beta{el5(44, 0)};

  // Ultraparallel pairs short-circuit.
  auto strict = coincidence_guard(e0, e1, space, beta, PairClass::Ultraparallel);
  REQUIRE(strict.has_value());
  CHECK(*strict == GuardOutcome::StrictSeparation);

  // Forcing the check exercises the divisibility test: (4 - sqrt5)^2 (e0 +- e1)
  // is not divisible by 44, so the guard passes.
  auto checked = coincidence_guard(e0, e1, space, beta, PairClass::Ultraparallel, true);
  REQUIRE(checked.has_value());
  CHECK(*checked == GuardOutcome::GuardChecked);

  // Against the unit ideal everything is divisible: the guard must fail and
  // request a retry with a larger C.
  IdealGen unit{FieldElement::one(5)};
  auto retry = coincidence_guard(e0, e1, space, unit, PairClass::Ultraparallel, true);
  CHECK(retry.has_value() == false);

  // A pair whose scaled product has no square root cannot coincide at all.
  KVector u{el5(0, 0), el5(0, 0), el5(1, 0)};
  KVector v{el5(1, 0), el5(0, 0), el5(2, 0)};
  auto impossible = coincidence_guard(u, v, space, beta, PairClass::Ultraparallel, true);
  REQUIRE(impossible.has_value());
  CHECK(*impossible == GuardOutcome::CaseAImpossible);
}

TEST_CASE("systole closed form and certified interval") {
  Systole s2 = systole_of(2, 5, 128);
  CHECK(s2.cosh_half == FieldElement(5, Rational(21, 11), Rational(8, 11)));
  Systole s3 = systole_of(3, 5, 128);
  CHECK(s3.cosh_half == FieldElement(5, Rational(43, 38), Rational(9, 38)));

  double expect = 2.0 * std::acosh((21.0 + 8.0 * std::sqrt(5.0)) / 11.0);
  CHECK(s2.length.midpoint_double() == doctest::Approx(expect).epsilon(1e-12));
  CHECK(s2.length.width() < 1e-30);

  // Strictly decreasing in i, certified at interval level.
  RealInterval prev = s2.length;
  for (long i = 3; i <= 8; ++i) {
    RealInterval cur = systole_of(i, 5, 128).length;
    CHECK(cur.strictly_below(prev));
    prev = cur;
  }

  CHECK_THROWS_AS(systole_of(1, 5, 128), DomainError);
  CHECK_THROWS_AS(systole_of(2, 17, 128), DomainError);  // 2^2 < sqrt(17)
  CHECK_NOTHROW(systole_of(3, 17, 128));
}

TEST_CASE("full pipeline report at n = 2, i = 2") {
  ConstructionReport r = run_pipeline(ConstructionInput{2, 5, 2, 128});

  CHECK(r.certificate.pair_class == PairClass::Ultraparallel);
  CHECK(r.certificate.C == 2);
  CHECK(r.certificate.c_rule == "normRoute");
  CHECK(r.certificate.beta == el5(44, 0));
  CHECK(r.certificate.beta_self == el5(42, -16));
  CHECK(r.certificate.beta_alt == el5(84, -32));
  CHECK(r.certificate.guard == GuardOutcome::StrictSeparation);
  CHECK(r.certificate.swapped_ideal_equal);
  CHECK(r.certificate.alt_ideal_equals_beta == false);

  CHECK(r.g00 == el5(21, -8));
  CHECK(r.g01 == el5(11, 0));
  CHECK(r.cosh_distance == FieldElement(5, Rational(21, 11), Rational(8, 11)));
  CHECK(r.cosh_distance == r.systole.cosh_half);
  CHECK(r.ideal_norm == 1936);
  CHECK(r.ideal_norm_alt == 1936);
  CHECK(r.index_bound.get_str() == "382074608478613020175306326016");
  CHECK(r.lower_exponent.has_value() == false);
  CHECK(r.upper_degree == 72);

  SpacePtr space = QuadSpace::family_form(2, 5);
  auto [e0, e1] = make_vectors(2, space);
  CHECK(r.e0 == e0);
  CHECK(r.e1 == e1);
}

TEST_CASE("pipeline dimensional bookkeeping") {
  ConstructionReport r4 = run_pipeline(ConstructionInput{4, 5, 2, 64});
  CHECK(r4.index_bound.get_str() ==
        "14881058511424953988078608769806432918740714444252299374974281300129389429838053376");
  REQUIRE(r4.lower_exponent.has_value());
  CHECK(*r4.lower_exponent == 2);
  CHECK(r4.upper_degree == 200);
  // The distance data does not depend on n.
  CHECK(r4.cosh_distance == FieldElement(5, Rational(21, 11), Rational(8, 11)));

  ConstructionReport r3 = run_pipeline(ConstructionInput{3, 5, 5, 64});
  REQUIRE(r3.lower_exponent.has_value());
  CHECK(*r3.lower_exponent == 1);
  CHECK(r3.upper_degree == 128);
  CHECK(r3.ideal_norm == 6150400);  // 16 (5^4 - 5)^2
}

TEST_CASE("pipeline ideal norms follow 16 (i^4 - 5)^2") {
  for (long i : {2L, 3L, 7L, 10L}) {
    ConstructionReport r = run_pipeline(ConstructionInput{2, 5, i, 64});
    BigInt m = BigInt(i) * i * i * i - 5;
    CHECK(r.ideal_norm == 16 * m * m);
    CHECK(r.ideal_norm_alt == r.ideal_norm);
  }
}

TEST_CASE("pipeline failures carry their stage") {
  try {
    run_pipeline(ConstructionInput{2, 4, 2, 128});  // d = 4 is not squarefree
    FAIL("expected a StageError");
  } catch (const StageError& e) {
    CHECK(e.stage == "certify_form");
  }
  try {
    run_pipeline(ConstructionInput{2, 5, 1, 128});  // i too small
    FAIL("expected a StageError");
  } catch (const StageError& e) {
    CHECK(e.stage == "make_vectors");
  }
  CHECK_THROWS_AS(run_pipeline(ConstructionInput{1, 5, 2, 128}), StageError);
}

TEST_CASE("desk verification finds no counterexamples on the family") {
  for (long i : {2L, 3L}) {
    VerificationReport r = verify_lemma_desk(ConstructionInput{2, 5, i, 64}, HeightBound(1));
    CHECK(r.enumerated == 8);
    CHECK(r.members == 1);  // only the identity is congruent to id mod beta
    CHECK(r.alpha_zero == 1);
    CHECK(r.alpha_unit_or_larger == 0);
    CHECK(r.alpha_subunit == 0);
    CHECK(r.members_separated);
    CHECK(r.violators_excluded);
    CHECK(r.offsets_integral);
    CHECK(r.offset_norms_ok);
    CHECK(r.passed());
    CHECK(r.C == 2);
  }

  // A wider bound sweeps in the omega-entry isometries (40 at height 2) and
  // still finds no counterexamples; threading does not change the outcome.
  VerificationReport wide = verify_lemma_desk(ConstructionInput{2, 5, 2, 64}, HeightBound(2), 2);
  CHECK(wide.enumerated == 40);
  CHECK(wide.passed());
}

TEST_CASE("minimal i for a systole target") {
  CHECK(min_i_for_systole_below(Rational(2), 5) == 4);
  CHECK(min_i_for_systole_below(Rational(1), 5) == 7);
  CHECK(min_i_for_systole_below(Rational(1, 2), 5) == 13);
  CHECK(min_i_for_systole_below(Rational(1, 10), 5) == 60);
  CHECK(min_i_for_systole_below(Rational(1, 100), 5) == 599);
  CHECK_THROWS_AS(min_i_for_systole_below(Rational(0), 5), DomainError);
  CHECK_THROWS_AS(min_i_for_systole_below(Rational(-1), 5), DomainError);
}
