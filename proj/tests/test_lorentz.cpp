// Quadratic-space certification over both real embeddings, hyperplane pair
// classification, exact distances, and the coincidence-vector construction.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "systolic/lorentz.hpp"

using namespace systolic;

namespace {

KMatrix diag3(long d, const FieldElement& a, const FieldElement& b, const FieldElement& c) {
  KMatrix F(3, 3, d);
  F.at(0, 0) = a;
  F.at(1, 1) = b;
  F.at(2, 2) = c;
  return F;
}

KVector vec3(long d, long x, long y, long z) {
  return KVector{FieldElement::integer(d, x), FieldElement::integer(d, y),
                 FieldElement::integer(d, z)};
}

}  // namespace

TEST_CASE("symmetric diagonalization is a congruence") {
  KMatrix F(3, 3, 5);
  F.at(0, 1) = FieldElement::one(5);
  F.at(1, 0) = FieldElement::one(5);
  F.at(2, 2) = FieldElement::integer(5, 2);

  Diagonalization dg = diagonalize_symmetric(F);
  CHECK(dg.positives == 2);
  CHECK(dg.negatives == 1);
  CHECK(dg.zeros == 0);

  KMatrix D = dg.transform.transpose() * F * dg.transform;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      if (r == c)
        CHECK(D.at(r, c) == dg.diagonal[static_cast<std::size_t>(r)]);
      else
        CHECK(D.at(r, c).is_zero());
    }
}

TEST_CASE("certification accepts the family form") {
  SpacePtr space = QuadSpace::family_form(2, 5);
  CHECK(space->dim() == 2);
  CHECK(space->d() == 5);
  CHECK(space->is_family_form());
  CHECK(inner(space, space->timelike_witness(), space->timelike_witness()).sign() < 0);

  SpacePtr big = QuadSpace::family_form(6, 13);
  CHECK(big->dim() == 6);
  CHECK(inner(big, big->timelike_witness(), big->timelike_witness()).sign() < 0);

  // A non-diagonal certified form.
  KMatrix F = diag3(5, -FieldElement::sqrt_d(5), FieldElement::one(5), FieldElement::one(5));
  F.at(0, 1) = FieldElement::one(5);
  F.at(1, 0) = FieldElement::one(5);
  SpacePtr skew = QuadSpace::certify(F);
  CHECK(skew->is_family_form() == false);
  CHECK(inner(skew, skew->timelike_witness(), skew->timelike_witness()).sign() < 0);
}

TEST_CASE("certification rejects bad forms with the computed signature") {
  // Wrong signature at sigma1.
  KMatrix pos = diag3(5, FieldElement::one(5), FieldElement::one(5), FieldElement::one(5));
  CHECK_THROWS_WITH_AS(QuadSpace::certify(pos),
                       doctest::Contains("signature (3,0) at sigma1"), DomainError);

  // Singular.
  KMatrix sing = diag3(5, -FieldElement::sqrt_d(5), FieldElement::one(5),
                       FieldElement::zero(5));
  CHECK_THROWS_WITH_AS(QuadSpace::certify(sing), doctest::Contains("singular"), DomainError);

  // Right signature at sigma1 but indefinite at sigma2.
  KMatrix twisted = diag3(5, -FieldElement::sqrt_d(5), FieldElement::sqrt_d(5),
                          FieldElement::one(5));
  CHECK_THROWS_WITH_AS(QuadSpace::certify(twisted),
                       doctest::Contains("not positive definite"), DomainError);

  // Shape errors.
  KMatrix rect(3, 2, 5);
  CHECK_THROWS_AS(QuadSpace::certify(rect), DomainError);
  KMatrix tiny(2, 2, 5);
  CHECK_THROWS_AS(QuadSpace::certify(tiny), DomainError);
  KMatrix asym = diag3(5, -FieldElement::sqrt_d(5), FieldElement::one(5),
                       FieldElement::one(5));
  asym.at(0, 1) = FieldElement::one(5);
  CHECK_THROWS_AS(QuadSpace::certify(asym), DomainError);
}

TEST_CASE("hyperplanes require spacelike normals in the right space") {
  SpacePtr space = QuadSpace::family_form(2, 5);
  CHECK_NOTHROW(Hyperplane(space, vec3(5, 0, 1, 0)));
  CHECK_THROWS_AS(Hyperplane(space, vec3(5, 1, 0, 0)), DomainError);   // timelike
  CHECK_THROWS_AS(Hyperplane(space, KVector{FieldElement::one(5)}), DomainError);
  CHECK_THROWS_AS(Hyperplane(nullptr, vec3(5, 0, 1, 0)), DomainError);
}

TEST_CASE("pair classification covers all four classes") {
  SpacePtr space = QuadSpace::family_form(2, 5);

  Hyperplane a(space, vec3(5, 0, 1, 0));
  Hyperplane b(space, vec3(5, 0, 0, 1));
  CHECK(classify_pair(a, b) == PairClass::Intersect);

  Hyperplane a3(space, scale(FieldElement::integer(5, -3), a.normal()));
  CHECK(classify_pair(a, a3) == PairClass::Equal);

  // On a certified space the discriminant (e0,e1)^2 - (e0,e0)(e1,e1) is an
  // element of K; vanishing at sigma1 forces vanishing at sigma2, where the
  // conjugate form is positive definite, so the normals are K-proportional.
  // Hence the borderline TangentAtInfinity class can never fire over K here;
  // equality of the discriminant always lands in Equal.
  FieldElement s7(5, Rational(-7), Rational(0));
  Hyperplane aneg(space, scale(s7, a.normal()));
  CHECK(classify_pair(a, aneg) == PairClass::Equal);
  CHECK(std::string(to_cstring(PairClass::TangentAtInfinity)) == "TangentAtInfinity");

  // The family pair is ultraparallel.
  FieldElement sd = FieldElement::sqrt_d(5);
  KVector e0{FieldElement::zero(5), FieldElement::zero(5), FieldElement::integer(5, 4) - sd};
  KVector e1{FieldElement::integer(5, -4), FieldElement::zero(5),
             FieldElement::integer(5, 4) + sd};
  Hyperplane h0(space, e0), h1(space, e1);
  CHECK(classify_pair(h0, h1) == PairClass::Ultraparallel);

  CHECK(std::string(to_cstring(PairClass::Ultraparallel)) == "Ultraparallel");

  SpacePtr other = QuadSpace::family_form(2, 2);
  Hyperplane o(other, vec3(2, 0, 1, 0));
  CHECK_THROWS_AS(classify_pair(a, o), DomainError);
}

TEST_CASE("classification is invariant under scaling the normals") {
  SpacePtr space = QuadSpace::family_form(2, 5);
  FieldElement sd = FieldElement::sqrt_d(5);
  KVector e0{FieldElement::zero(5), FieldElement::zero(5), FieldElement::integer(5, 4) - sd};
  KVector e1{FieldElement::integer(5, -4), FieldElement::zero(5),
             FieldElement::integer(5, 4) + sd};
  FieldElement c(5, Rational(7, 3), Rational(-2, 3));
  REQUIRE(c.sign() != 0);
  Hyperplane h0(space, e0), h1(space, e1);
  Hyperplane s0(space, scale(c, e0)), s1(space, scale(c * c, e1));
  CHECK(classify_pair(s0, s1) == classify_pair(h0, h1));
  CHECK(cosh_sq_distance(s0, s1) == cosh_sq_distance(h0, h1));
}

TEST_CASE("exact distance of the family pair at i = 2") {
  SpacePtr space = QuadSpace::family_form(2, 5);
  FieldElement sd = FieldElement::sqrt_d(5);
  KVector e0{FieldElement::zero(5), FieldElement::zero(5), FieldElement::integer(5, 4) - sd};
  KVector e1{FieldElement::integer(5, -4), FieldElement::zero(5),
             FieldElement::integer(5, 4) + sd};
  Hyperplane h0(space, e0), h1(space, e1);

  FieldElement cosh_rho(5, Rational(21, 11), Rational(8, 11));
  auto exact = cosh_distance_exact(h0, h1);
  REQUIRE(exact.has_value());
  CHECK(*exact == cosh_rho);
  CHECK(cosh_sq_distance(h0, h1) == cosh_rho * cosh_rho);

  RealInterval rho = distance(h0, h1, 128);
  double expect = std::acosh((21.0 + 8.0 * std::sqrt(5.0)) / 11.0);
  CHECK(rho.midpoint_double() == doctest::Approx(expect).epsilon(1e-12));
  CHECK(rho.width() < 1e-30);

  // Intersecting pairs have no distance.
  Hyperplane a(space, vec3(5, 0, 1, 0));
  Hyperplane b(space, vec3(5, 0, 0, 1));
  CHECK_THROWS_AS(cosh_sq_distance(a, b), DomainError);
}

TEST_CASE("coincidence vectors: closed form on the family pair") {
  SpacePtr space = QuadSpace::family_form(2, 5);
  FieldElement sd = FieldElement::sqrt_d(5);
  FieldElement g(5, Rational(21), Rational(-8));  // (4-sqrt5)^2 = (e0,e0) = (e1,e1)
  KVector e0{FieldElement::zero(5), FieldElement::zero(5), FieldElement::integer(5, 4) - sd};
  KVector e1{FieldElement::integer(5, -4), FieldElement::zero(5),
             FieldElement::integer(5, 4) + sd};

  auto pair = coincidence_vectors(e0, e1, space);
  REQUIRE(pair.has_value());
  CHECK(pair->scaled0 == scale(g, e0));
  CHECK(pair->scaled1 == scale(g, e1));
  CHECK(all_integral(pair->scaled0));
  CHECK(all_integral(pair->scaled1));

  // sqrt((e0,e0)(e1,e1)) not in K: the case-A reduction is impossible.
  KVector u = vec3(5, 0, 0, 1);
  KVector v{FieldElement::integer(5, 1), FieldElement::zero(5), FieldElement::integer(5, 2)};
  CHECK(coincidence_vectors(u, v, space).has_value() == false);

  // Non-integral input is rejected.
  KVector frac{FieldElement::zero(5), FieldElement::zero(5),
               FieldElement::rational(5, Rational(1, 2))};
  CHECK_THROWS_AS(coincidence_vectors(frac, e1, space), DomainError);
}

TEST_CASE("inner product is bilinear and symmetric") {
  SpacePtr space = QuadSpace::family_form(3, 5);
  KVector u{FieldElement::integer(5, 1), FieldElement::integer(5, 2),
            FieldElement::integer(5, 3), FieldElement::integer(5, 4)};
  KVector v{FieldElement::integer(5, -1), FieldElement::integer(5, 0),
            FieldElement::integer(5, 2), FieldElement::integer(5, 1)};
  KVector w{FieldElement::integer(5, 5), FieldElement::integer(5, -2),
            FieldElement::integer(5, 0), FieldElement::integer(5, 1)};
  FieldElement c(5, Rational(2, 3), Rational(1, 4));

  CHECK(inner(space, u, v) == inner(space, v, u));
  CHECK(inner(space, add(u, w), v) == inner(space, u, v) + inner(space, w, v));
  CHECK(inner(space, scale(c, u), v) == c * inner(space, u, v));
  // Polarization identity.
  FieldElement quad = inner(space, add(u, v), add(u, v));
  CHECK(quad == inner(space, u, u) + inner(space, v, v) +
                    FieldElement::integer(5, 2) * inner(space, u, v));
}
