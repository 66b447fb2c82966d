#pragma once

// Command-line surface: construct | sweep | classify | check-form | verify.
//
// Exit codes: 0 success, 1 mathematical failure or counterexample, 2 usage /
// parse errors.  All documents are deterministic; --meta appends provenance
// (tool name and version) without touching the data fields.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "systolic/inbreed.hpp"
#include "systolic/io.hpp"

namespace systolic {

inline constexpr const char* kCliVersion = "0.1.0";

namespace detail {

inline int write_document(const std::string& text, const std::string& output_path,
                          std::ostream& out, std::ostream& err) {
  if (output_path.empty()) {
    out << text;
    return 0;
  }
  std::ofstream f(output_path, std::ios::binary);
  if (!f) {
    err << "error: cannot write " << output_path << "\n";
    return 1;
  }
  f << text;
  return 0;
}

inline std::string finish_json(ojson j, bool meta) {
  if (meta) j["meta"] = ojson{{"tool", "systolic"}, {"version", kCliVersion}};
  return j.dump(2) + "\n";
}

inline std::string meta_line(bool meta) {
  return meta ? std::string("# systolic ") + kCliVersion + "\n" : std::string();
}

inline std::string interval_text(const RealInterval& iv) {
  return "[" + iv.lower_hex() + ", " + iv.upper_hex() + "] (" +
         std::to_string(static_cast<long>(iv.precision())) + " bits) mid=" +
         iv.midpoint_decimal();
}

inline std::string report_text(const ConstructionReport& r, bool meta) {
  std::ostringstream o;
  o << "input: n=" << r.input.n << " d=" << r.input.d << " i=" << r.input.i
    << " precision=" << r.input.precision << "\n";
  o << "pairClass: " << to_cstring(r.certificate.pair_class) << "\n";
  o << "C: " << r.certificate.C << " (" << r.certificate.c_rule << ")\n";
  o << "beta: " << to_string(r.certificate.beta) << "\n";
  o << "betaSelf: " << to_string(r.certificate.beta_self) << "\n";
  o << "betaAlt: " << to_string(r.certificate.beta_alt) << "\n";
  o << "coincidenceGuard: " << to_cstring(r.certificate.guard) << "\n";
  o << "swappedIdealEqual: " << (r.certificate.swapped_ideal_equal ? "true" : "false") << "\n";
  o << "altIdealEqualsBeta: " << (r.certificate.alt_ideal_equals_beta ? "true" : "false")
    << "\n";
  o << "coshDistance: " << to_string(r.cosh_distance) << "\n";
  o << "systole: " << interval_text(r.systole.length) << "\n";
  o << "idealNorm: " << r.ideal_norm.get_str() << "\n";
  o << "idealNormAlt: " << r.ideal_norm_alt.get_str() << "\n";
  o << "indexBound: " << r.index_bound.get_str() << "\n";
  if (r.lower_exponent) o << "lowerExponent: " << *r.lower_exponent << "\n";
  o << "upperDegree: " << r.upper_degree << "\n";
  o << meta_line(meta);
  return o.str();
}

inline std::string verification_text(const VerificationReport& r, bool meta) {
  std::ostringstream o;
  o << "verification: n=" << r.input.n << " d=" << r.input.d << " i=" << r.input.i
    << " bound=" << r.bound << "\n";
  o << "C: " << r.C << "\n";
  o << "beta: " << to_string(r.beta) << "\n";
  o << "betaSelf: " << to_string(r.beta_self) << "\n";
  o << "enumerated: " << r.enumerated << "\n";
  o << "members: " << r.members << "\n";
  o << "alphaCases: zero=" << r.alpha_zero << " unitOrLarger=" << r.alpha_unit_or_larger
    << " subUnit=" << r.alpha_subunit << "\n";
  o << "checks: membersSeparated=" << (r.members_separated ? "pass" : "FAIL")
    << " violatorsExcluded=" << (r.violators_excluded ? "pass" : "FAIL")
    << " offsetsIntegral=" << (r.offsets_integral ? "pass" : "FAIL")
    << " offsetNormsAtLeastOne=" << (r.offset_norms_ok ? "pass" : "FAIL") << "\n";
  if (r.counterexamples.empty()) {
    o << "counterexamples: none\n";
  } else {
    o << "counterexamples: " << r.counterexamples.size() << "\n";
    for (const auto& c : r.counterexamples)
      o << "  " << c.reason << ": " << matrix_to_json(c.matrix).dump() << "\n";
  }
  o << meta_line(meta);
  return o.str();
}

}  // namespace detail

// Testable entry point; argv-style arguments without the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"exact certificates for close ultraparallel hyperplane pairs over Q(sqrt(d))"};
  app.name("systolic");
  app.require_subcommand(1);

  // construct ----------------------------------------------------------------
  int c_n = 0;
  long c_d = 5, c_i = 0, c_prec = 128;
  std::string c_eps, c_format = "json", c_output;
  bool c_meta = false;
  CLI::App* construct = app.add_subcommand("construct", "build one certified construction report");
  construct->add_option("--n", c_n, "hyperbolic dimension, >= 2")->required();
  construct->add_option("--d", c_d, "field parameter, squarefree >= 2 (default 5)");
  CLI::Option* opt_i = construct->add_option("--i", c_i, "family parameter, >= 2");
  CLI::Option* opt_eps = construct->add_option(
      "--epsilon", c_eps, "systole target; selects the minimal i with systole < epsilon");
  opt_i->excludes(opt_eps);
  opt_eps->excludes(opt_i);
  construct->add_option("--precision", c_prec, "interval precision in bits (default 128)");
  construct->add_option("--format", c_format, "json|text")
      ->check(CLI::IsMember({"json", "text"}));
  construct->add_option("--output", c_output, "write the document to a file instead of stdout");
  construct->add_flag("--meta", c_meta, "append tool provenance to the document");

  // sweep --------------------------------------------------------------------
  int s_n = 0;
  long s_d = 5, s_start = 0, s_end = 0, s_prec = 128;
  std::string s_format = "csv", s_output;
  bool s_meta = false;
  CLI::App* sweep = app.add_subcommand("sweep", "tabulate the family over a range of i");
  sweep->add_option("--n", s_n, "hyperbolic dimension, >= 2")->required();
  sweep->add_option("--d", s_d, "field parameter (default 5)");
  sweep->add_option("--i-start", s_start, "first family parameter, >= 2")->required();
  sweep->add_option("--i-end", s_end, "last family parameter, >= i-start")->required();
  sweep->add_option("--precision", s_prec, "interval precision in bits (default 128)");
  sweep->add_option("--format", s_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  sweep->add_option("--output", s_output, "write the table to a file instead of stdout");
  sweep->add_flag("--meta", s_meta, "append tool provenance (json only)");

  // classify -----------------------------------------------------------------
  int k_n = 0;
  long k_d = 5, k_i = 0, k_prec = 128;
  std::string k_form, k_e0, k_e1, k_format = "text", k_output;
  CLI::App* classify = app.add_subcommand("classify", "classify a hyperplane pair");
  classify->add_option("--form", k_form, "form file (JSON); default is the family form");
  classify->add_option("--n", k_n, "dimension for the default family form");
  classify->add_option("--d", k_d, "field parameter (default 5)");
  classify->add_option("--i", k_i, "use the family pair for this parameter");
  classify->add_option("--e0", k_e0, "first normal vector file (JSON array)");
  classify->add_option("--e1", k_e1, "second normal vector file (JSON array)");
  classify->add_option("--precision", k_prec, "interval precision in bits (default 128)");
  classify->add_option("--format", k_format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));
  classify->add_option("--output", k_output, "write the document to a file instead of stdout");

  // check-form ---------------------------------------------------------------
  int f_n = 0;
  long f_d = 5;
  std::string f_form, f_format = "text", f_output;
  CLI::App* check_form = app.add_subcommand("check-form", "certify a quadratic form");
  check_form->add_option("--form", f_form, "form file (JSON); default is the family form");
  check_form->add_option("--n", f_n, "dimension for the default family form");
  check_form->add_option("--d", f_d, "field parameter (default 5)");
  check_form->add_option("--format", f_format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));
  check_form->add_option("--output", f_output, "write the document to a file instead of stdout");

  // verify -------------------------------------------------------------------
  int v_n = 2;
  long v_d = 5, v_i = 0, v_bound = 3, v_prec = 128;
  unsigned v_threads = 1;
  std::string v_format = "text", v_output, v_emit;
  CLI::App* verify = app.add_subcommand("verify", "desk-verify the separation lemma by brute force");
  verify->add_option("--n", v_n, "hyperbolic dimension (default 2; keep small)");
  verify->add_option("--d", v_d, "field parameter (default 5)");
  verify->add_option("--i", v_i, "family parameter, >= 2")->required();
  verify->add_option("--bound", v_bound, "height bound B on omega-coordinates (default 3)");
  verify->add_option("--threads", v_threads, "partition the enumeration (default 1)");
  verify->add_option("--emit-isometries", v_emit,
                     "also write the enumerated isometries as JSON-lines to this file");
  verify->add_option("--precision", v_prec, "interval precision in bits (default 128)");
  verify->add_option("--format", v_format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));
  verify->add_option("--output", v_output, "write the document to a file instead of stdout");

  // parse --------------------------------------------------------------------
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("systolic");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    auto parsed = app.get_subcommands();
    out << (parsed.empty() ? app.help() : parsed.front()->help());
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (app.got_subcommand(construct)) {
      if (c_n < 2) {
        err << "usage error: --n must be >= 2\n";
        return 2;
      }
      if (opt_i->count() == 0 && opt_eps->count() == 0) {
        err << "usage error: exactly one of --i / --epsilon is required\n";
        return 2;
      }
      long i = c_i;
      if (opt_eps->count() > 0) {
        Rational eps;
        try {
          eps = parse_decimal_or_rational(c_eps);
        } catch (const Error& e) {
          err << "usage error: " << e.what() << "\n";
          return 2;
        }
        i = min_i_for_systole_below(eps, c_d);
      } else if (i < 2) {
        err << "usage error: --i must be >= 2\n";
        return 2;
      }
      ConstructionInput input{c_n, c_d, i, static_cast<mpfr_prec_t>(c_prec)};
      ConstructionReport report = run_pipeline(input);
      std::string doc = c_format == "json"
                            ? detail::finish_json(report_to_json(report), c_meta)
                            : detail::report_text(report, c_meta);
      return detail::write_document(doc, c_output, out, err);
    }

    if (app.got_subcommand(sweep)) {
      if (s_n < 2 || s_start < 2 || s_end < s_start) {
        err << "usage error: need --n >= 2 and 2 <= i-start <= i-end\n";
        return 2;
      }
      std::vector<SweepRow> rows;
      rows.reserve(static_cast<std::size_t>(s_end - s_start + 1));
      for (long i = s_start; i <= s_end; ++i) {
        ConstructionInput input{s_n, s_d, i, static_cast<mpfr_prec_t>(s_prec)};
        rows.push_back(make_sweep_row(run_pipeline(input)));
      }
      std::string doc = s_format == "json"
                            ? detail::finish_json(sweep_to_json(rows), s_meta)
                            : sweep_to_csv(rows);
      return detail::write_document(doc, s_output, out, err);
    }

    if (app.got_subcommand(classify)) {
      SpacePtr space;
      if (!k_form.empty()) {
        space = form_from_json(load_json_file(k_form));
      } else {
        if (k_n < 2) {
          err << "usage error: --n >= 2 is required when no --form is given\n";
          return 2;
        }
        space = QuadSpace::family_form(k_n, k_d);
      }
      KVector e0(1, FieldElement::zero(space->d())), e1 = e0;
      if (classify->get_option("--i")->count() > 0) {
        auto pair = make_vectors(k_i, space);
        e0 = pair.first;
        e1 = pair.second;
      } else if (!k_e0.empty() && !k_e1.empty()) {
        e0 = vector_from_json(load_json_file(k_e0), space->d());
        e1 = vector_from_json(load_json_file(k_e1), space->d());
      } else {
        err << "usage error: give --i or both --e0 and --e1\n";
        return 2;
      }
      Hyperplane h0(space, e0), h1(space, e1);
      PairClass tag = classify_pair(h0, h1);
      std::ostringstream text;
      ojson j{{"pairClass", to_cstring(tag)}};
      text << to_cstring(tag) << "\n";
      if (tag == PairClass::Ultraparallel) {
        FieldElement csq = cosh_sq_distance(h0, h1);
        auto exact = cosh_distance_exact(h0, h1);
        RealInterval rho = distance(h0, h1, static_cast<mpfr_prec_t>(k_prec));
        j["coshRhoSquared"] = to_string(csq);
        j["coshRho"] = exact ? ojson(to_string(*exact)) : ojson(nullptr);
        j["rho"] = interval_to_json(rho);
        text << "cosh_rho^2 = " << to_string(csq) << "\n";
        if (exact) text << "cosh_rho = " << to_string(*exact) << "\n";
        text << "rho in " << detail::interval_text(rho) << "\n";
      }
      std::string doc = k_format == "json" ? detail::finish_json(j, false) : text.str();
      return detail::write_document(doc, k_output, out, err);
    }

    if (app.got_subcommand(check_form)) {
      SpacePtr space;
      try {
        if (!f_form.empty()) {
          space = form_from_json(load_json_file(f_form));
        } else {
          if (f_n < 2) {
            err << "usage error: --n >= 2 is required when no --form is given\n";
            return 2;
          }
          space = QuadSpace::family_form(f_n, f_d);
        }
      } catch (const DomainError& e) {
        err << "form rejected: " << e.what() << "\n";
        return 1;
      }
      std::string doc;
      if (f_format == "json") {
        doc = detail::finish_json(form_certificate_to_json(space), false);
      } else {
        doc = "signature (" + std::to_string(space->dim()) +
              ",1) at sigma1; positive definite at sigma2\n";
      }
      return detail::write_document(doc, f_output, out, err);
    }

    if (app.got_subcommand(verify)) {
      if (v_n < 2 || v_i < 2 || v_bound < 1) {
        err << "usage error: need --n >= 2, --i >= 2, --bound >= 1\n";
        return 2;
      }
      ConstructionInput input{v_n, v_d, v_i, static_cast<mpfr_prec_t>(v_prec)};
      VerificationReport report = verify_lemma_desk(input, HeightBound(v_bound), v_threads);
      if (!v_emit.empty()) {
        auto isos = enumerate_integral_isometries(QuadSpace::family_form(v_n, v_d),
                                                  HeightBound(v_bound), v_threads);
        std::ofstream f(v_emit, std::ios::binary);
        if (!f) {
          err << "error: cannot write " << v_emit << "\n";
          return 1;
        }
        f << isometries_to_json_lines(isos);
      }
      std::string doc = v_format == "json"
                            ? detail::finish_json(verification_to_json(report), false)
                            : detail::verification_text(report, false);
      int rc = detail::write_document(doc, v_output, out, err);
      if (rc != 0) return rc;
      if (!report.passed()) {
        err << "counterexamples found: the separation dichotomy FAILED at desk scale\n";
        return 1;
      }
      return 0;
    }
  } catch (const StageError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << "usage error: no subcommand\n";
  return 2;
}

}  // namespace systolic
