#pragma once

// Stable JSON / CSV serialization of certificates and reports.
//
// Conventions: exact field values are always the canonical element strings
// ("a+b*sqrt(d)"), never floats; intervals serialize as lossless hex-float
// endpoint pairs with their precision; arbitrary-precision integers emit as
// JSON numbers when they fit in 64 bits and as decimal strings beyond that.
// Ordered JSON keeps emission order fixed, so identical inputs produce
// byte-identical documents.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "systolic/arithgroup.hpp"
#include "systolic/errors.hpp"
#include "systolic/inbreed.hpp"
#include "systolic/interval.hpp"
#include "systolic/lorentz.hpp"
#include "systolic/matrix.hpp"
#include "systolic/numberfield.hpp"

namespace systolic {

using ojson = nlohmann::ordered_json;

inline ojson big_to_json(const BigInt& z) {
  if (z.fits_slong_p()) return static_cast<std::int64_t>(z.get_si());
  return z.get_str();
}

inline ojson interval_to_json(const RealInterval& iv) {
  return ojson{{"lo", iv.lower_hex()},
               {"hi", iv.upper_hex()},
               {"bits", static_cast<std::int64_t>(iv.precision())}};
}

inline ojson vector_to_json(const KVector& v) {
  ojson arr = ojson::array();
  for (const auto& x : v) arr.push_back(to_string(x));
  return arr;
}

inline KVector vector_from_json(const ojson& j, long d) {
  if (!j.is_array() || j.empty()) throw DomainError("vector document must be a nonempty array");
  KVector out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(parse_element(e.get<std::string>(), d));
  return out;
}

inline ojson matrix_to_json(const KMatrix& m) {
  ojson rows = ojson::array();
  for (int r = 0; r < m.rows(); ++r) {
    ojson row = ojson::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(to_string(m.at(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline KMatrix matrix_from_json(const ojson& j, long d) {
  if (!j.is_array() || j.empty() || !j.front().is_array() || j.front().empty())
    throw DomainError("matrix document must be a nonempty array of arrays");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j.front().size());
  KMatrix m(rows, cols, d);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j[r].size()) != cols)
      throw DomainError("matrix document has ragged rows");
    for (int c = 0; c < cols; ++c)
      m.at(r, c) = parse_element(j[r][c].get<std::string>(), d);
  }
  return m;
}

// Form file: { "d": 5, "n": 4, "F": [[elem,...],...] }.
inline ojson form_to_json(const SpacePtr& space) {
  return ojson{{"d", space->d()},
               {"n", space->dim()},
               {"F", matrix_to_json(space->gram())}};
}

inline SpacePtr form_from_json(const ojson& j) {
  if (!j.contains("d") || !j.contains("n") || !j.contains("F"))
    throw DomainError("form document needs fields d, n, F");
  long d = j.at("d").get<long>();
  int n = j.at("n").get<int>();
  KMatrix F = matrix_from_json(j.at("F"), d);
  if (F.rows() != n + 1 || F.cols() != n + 1)
    throw DomainError("form document: F must be (n+1) x (n+1)");
  return QuadSpace::certify(F);
}

// Isometry file: the matrix plus the form it acts on.
inline ojson isometry_to_json(const Isometry& h) {
  return ojson{{"form", form_to_json(h.space())}, {"matrix", matrix_to_json(h.matrix())}};
}

inline Isometry isometry_from_json(const ojson& j) {
  if (!j.contains("form") || !j.contains("matrix"))
    throw DomainError("isometry document needs fields form, matrix");
  SpacePtr space = form_from_json(j.at("form"));
  return verify_isometry(matrix_from_json(j.at("matrix"), space->d()), space);
}

// Enumeration stream: JSON-lines, one bare matrix per line.
inline std::string isometries_to_json_lines(const std::vector<Isometry>& hs) {
  std::ostringstream out;
  for (const auto& h : hs) out << matrix_to_json(h.matrix()).dump() << '\n';
  return out.str();
}

inline ojson input_to_json(const ConstructionInput& in) {
  return ojson{{"n", in.n},
               {"d", in.d},
               {"i", in.i},
               {"precision", static_cast<std::int64_t>(in.precision)}};
}

inline ojson certificate_to_json(const SeparationCertificate& c) {
  return ojson{{"pairClass", to_cstring(c.pair_class)},
               {"C", c.C},
               {"cRule", c.c_rule},
               {"beta", to_string(c.beta)},
               {"betaSelf", to_string(c.beta_self)},
               {"betaAlt", to_string(c.beta_alt)},
               {"coincidenceGuard", to_cstring(c.guard)},
               {"swappedIdealEqual", c.swapped_ideal_equal},
               {"altIdealEqualsBeta", c.alt_ideal_equals_beta}};
}

inline ojson gram_to_json(const ConstructionReport& r) {
  return ojson{{"g00", to_string(r.g00)},
               {"g01", to_string(r.g01)},
               {"g11", to_string(r.g11)},
               {"g00_sigma", to_string(r.g00.conjugate())},
               {"g01_sigma", to_string(r.g01.conjugate())},
               {"g11_sigma", to_string(r.g11.conjugate())}};
}

inline ojson report_to_json(const ConstructionReport& r) {
  ojson j{{"input", input_to_json(r.input)},
          {"e0", vector_to_json(r.e0)},
          {"e1", vector_to_json(r.e1)},
          {"gram", gram_to_json(r)},
          {"certificate", certificate_to_json(r.certificate)},
          {"coshDistance", to_string(r.cosh_distance)},
          {"systole", interval_to_json(r.systole.length)},
          {"idealNorm", big_to_json(r.ideal_norm)},
          {"idealNormAlt", big_to_json(r.ideal_norm_alt)},
          {"indexBound", big_to_json(r.index_bound)}};
  if (r.lower_exponent) j["lowerExponent"] = *r.lower_exponent;
  j["upperDegree"] = r.upper_degree;
  return j;
}

inline ojson verification_to_json(const VerificationReport& r) {
  ojson counter = ojson::array();
  for (const auto& c : r.counterexamples)
    counter.push_back(ojson{{"matrix", matrix_to_json(c.matrix)}, {"reason", c.reason}});
  return ojson{{"input", input_to_json(r.input)},
               {"bound", r.bound},
               {"C", r.C},
               {"beta", to_string(r.beta)},
               {"betaSelf", to_string(r.beta_self)},
               {"enumerated", r.enumerated},
               {"members", r.members},
               {"alphaCases",
                ojson{{"zero", r.alpha_zero},
                      {"unitOrLarger", r.alpha_unit_or_larger},
                      {"subUnit", r.alpha_subunit}}},
               {"checks",
                ojson{{"membersSeparated", r.members_separated},
                      {"violatorsExcluded", r.violators_excluded},
                      {"offsetsIntegral", r.offsets_integral},
                      {"offsetNormsAtLeastOne", r.offset_norms_ok}}},
               {"counterexamples", std::move(counter)}};
}

// ---- sweep table -----------------------------------------------------------

struct SweepRow {
  long i;
  std::string cosh_distance;  // exact element string
  std::string systole_mid;    // decimal midpoint (display only)
  BigInt ideal_norm;
  BigInt index_bound;
  std::optional<int> lower_exponent;
  long upper_degree;
};

inline SweepRow make_sweep_row(const ConstructionReport& r) {
  return SweepRow{r.input.i,
                  to_string(r.cosh_distance),
                  r.systole.length.midpoint_decimal(),
                  r.ideal_norm,
                  r.index_bound,
                  r.lower_exponent,
                  r.upper_degree};
}

inline const char* sweep_csv_header() {
  return "i,cosh_distance,systole_mid,ideal_norm,index_bound,lower_exponent,upper_degree";
}

inline std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << sweep_csv_header() << '\n';
  for (const auto& r : rows) {
    out << r.i << ',' << r.cosh_distance << ',' << r.systole_mid << ','
        << r.ideal_norm.get_str() << ',' << r.index_bound.get_str() << ',';
    if (r.lower_exponent) out << *r.lower_exponent;
    out << ',' << r.upper_degree << '\n';
  }
  return out.str();
}

inline ojson sweep_to_json(const std::vector<SweepRow>& rows) {
  ojson arr = ojson::array();
  for (const auto& r : rows) {
    ojson j{{"i", r.i},
            {"coshDistance", r.cosh_distance},
            {"systoleMid", r.systole_mid},
            {"idealNorm", big_to_json(r.ideal_norm)},
            {"indexBound", big_to_json(r.index_bound)},
            {"lowerExponent", r.lower_exponent ? ojson(*r.lower_exponent) : ojson(nullptr)},
            {"upperDegree", r.upper_degree}};
    arr.push_back(std::move(j));
  }
  return arr;
}

// Signature certificate document for a form.
inline ojson form_certificate_to_json(const SpacePtr& space) {
  return ojson{{"d", space->d()},
               {"n", space->dim()},
               {"signatureSigma1", ojson::array({space->dim(), 1})},
               {"sigma2PositiveDefinite", true},
               {"timelikeWitness", vector_to_json(space->timelike_witness())}};
}

inline ojson load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open file: " + path);
  ojson j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw DomainError("bad JSON in " + path + ": " + e.what());
  }
  return j;
}

// Decimal-or-rational literal ("0.1", "1/10", "2") to an exact rational.
inline Rational parse_decimal_or_rational(const std::string& text) {
  std::string s = detail::strip_space(text);
  auto dot = s.find('.');
  if (dot == std::string::npos) return parse_rational(s);
  std::string head = s.substr(0, dot), tail = s.substr(dot + 1);
  if (tail.find_first_not_of("0123456789") != std::string::npos)
    throw DomainError("bad decimal literal '" + text + "'");
  bool negative = !head.empty() && head.front() == '-';
  if (negative || (!head.empty() && head.front() == '+')) head = head.substr(1);
  if (head.empty()) head = "0";
  if (head.find_first_not_of("0123456789") != std::string::npos)
    throw DomainError("bad decimal literal '" + text + "'");
  BigInt scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, tail.empty() ? 0 : tail.size());
  BigInt whole(head), frac(tail.empty() ? "0" : tail);
  Rational r = detail::make_rational(whole * scale + frac, scale);
  return negative ? Rational(-r) : r;
}

}  // namespace systolic
