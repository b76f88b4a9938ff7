#include "xxzfid/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "xxzfid/elliptic.hpp"
#include "xxzfid/errors.hpp"
#include "xxzfid/fidelity.hpp"
#include "xxzfid/qseries.hpp"
#include "xxzfid/scaling.hpp"

namespace xxzfid::cli {

using json = nlohmann::ordered_json;

namespace {

Tolerance tolerance_of(const RunConfig& c) { return {c.rel_tol, c.max_terms}; }

json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

struct PointRow {
  double x, eps, delta, xi, ln_xi, f, ln_f, ratio;
  std::string path;
  double est_rel_error;
};

PointRow evaluate_point(const ModelPoint<double>& p, const Tolerance& tol, bool cross_check) {
  const auto fid = fidelity(p, tol, cross_check);
  const auto xi = correlation_length(p, tol);
  return {p.x,     p.eps,  p.delta, xi.xi,  xi.ln_xi, fid.f, fid.ln_f, -fid.ln_f / xi.ln_xi,
          std::string(to_string(fid.path)), fid.est_rel_error};
}

json to_json(const PointRow& r) {
  json j;
  j["x"] = number(r.x);
  j["eps"] = number(r.eps);
  j["delta"] = number(r.delta);
  j["xi"] = number(r.xi);
  j["ln_xi"] = number(r.ln_xi);
  j["f"] = number(r.f);
  j["ln_f"] = number(r.ln_f);
  j["ratio"] = number(r.ratio);
  j["path"] = r.path;
  j["est_rel_error"] = number(r.est_rel_error);
  return j;
}

std::string to_csv(const PointRow& r) {
  std::string line;
  for (double v : {r.x, r.eps, r.delta, r.xi, r.ln_xi, r.f, r.ln_f, r.ratio}) {
    line += format_number(v);
    line += ',';
  }
  line += r.path;
  line += ',';
  line += format_number(r.est_rel_error);
  return line;
}

ModelPoint<double> point_of(const RunConfig& c) {
  return c.x ? ModelPoint<double>::from_x(*c.x) : ModelPoint<double>::from_eps(*c.eps);
}

std::vector<double> grid_values(const GridSpec& g) {
  return g.spacing == Spacing::log ? log_spaced(g.min, g.max, g.count)
                                   : linear_spaced(g.min, g.max, g.count);
}

void emit_eval(const RunConfig& c, std::ostream& out) {
  const auto row = evaluate_point(point_of(c), tolerance_of(c), c.cross_check);
  if (c.format == OutputFormat::csv) {
    out << kPointColumns << '\n' << to_csv(row) << '\n';
  } else {
    json j = to_json(row);
    out << j.dump(2) << '\n';
  }
}

void emit_scan(const RunConfig& c, std::ostream& out) {
  const auto values = grid_values(c.grid);
  const Tolerance tol = tolerance_of(c);
  const auto rows = parallel_map(
      values.size(),
      [&](std::size_t i) {
        const auto p = c.grid.coordinate == Coordinate::x ? ModelPoint<double>::from_x(values[i])
                                                          : ModelPoint<double>::from_eps(values[i]);
        return evaluate_point(p, tol, c.cross_check);
      },
      c.threads);
  if (c.format == OutputFormat::csv) {
    out << kPointColumns << '\n';
    for (const auto& r : rows) out << to_csv(r) << '\n';
    return;
  }
  json j;
  j["command"] = "scan";
  j["rows"] = json::array();
  for (const auto& r : rows) j["rows"].push_back(to_json(r));
  out << j.dump(2) << '\n';
}

struct FitReport {
  std::string quantity;
  AsymptoticFit fit;
  double reference_A, reference_B, log_term;
};

void emit_fit(const RunConfig& c, std::ostream& out) {
  const auto eps = log_spaced(c.grid.min, c.grid.max, c.grid.count);
  const Tolerance tol = tolerance_of(c);
  const double pi2 = pi<double>() * pi<double>();
  auto report = [&](std::string name, const std::vector<Sample>& samples, double ref_a,
                    double ref_b) {
    const auto with_log = samples.size() >= 4 ? fit_with_log_term(samples).coefficients[3] : NAN;
    return FitReport{std::move(name), fit_asymptote(samples), ref_a, ref_b, with_log};
  };
  const std::vector<FitReport> reports{
      report("minus_ln_f", minus_ln_f_samples(eps, tol, c.threads), pi2 / 16, -std::log(2.0) / 4),
      report("ln_xi", ln_xi_samples(eps, tol, c.threads), pi2 / 2, -std::log(4.0))};

  if (c.format == OutputFormat::csv) {
    out << "quantity,A,B,C,max_residual,sample_count,reference_A,reference_B,A_rel_error,"
           "B_abs_error,log_term_coefficient\n";
    for (const auto& r : reports) {
      out << r.quantity;
      for (double v : {r.fit.A, r.fit.B, r.fit.C, r.fit.max_residual})
        out << ',' << format_number(v);
      out << ',' << r.fit.sample_count;
      for (double v : {r.reference_A, r.reference_B, std::abs(r.fit.A / r.reference_A - 1.0),
                       std::abs(r.fit.B - r.reference_B), r.log_term})
        out << ',' << format_number(v);
      out << '\n';
    }
    return;
  }
  json j;
  j["command"] = "fit";
  j["eps_min"] = c.grid.min;
  j["eps_max"] = c.grid.max;
  j["count"] = c.grid.count;
  for (const auto& r : reports) {
    json q;
    q["A"] = number(r.fit.A);
    q["B"] = number(r.fit.B);
    q["C"] = number(r.fit.C);
    q["max_residual"] = number(r.fit.max_residual);
    q["sample_count"] = r.fit.sample_count;
    q["reference_A"] = r.reference_A;
    q["reference_B"] = r.reference_B;
    q["A_rel_error"] = number(std::abs(r.fit.A / r.reference_A - 1.0));
    q["B_abs_error"] = number(std::abs(r.fit.B - r.reference_B));
    q["log_term_coefficient"] = number(r.log_term);
    j[r.quantity] = q;
  }
  out << j.dump(2) << '\n';
}

void emit_identities(const RunConfig& c, std::ostream& out) {
  const auto suites = run_identity_suites(tolerance_of(c), c.threads);
  bool all = true;
  for (const auto& s : suites) all = all && s.pass();
  if (c.format == OutputFormat::csv) {
    out << "suite,cases,max_residual,threshold,pass\n";
    for (const auto& s : suites)
      out << s.name << ',' << s.cases << ',' << format_number(s.max_residual) << ','
          << format_number(s.threshold) << ',' << (s.pass() ? "true" : "false") << '\n';
    return;
  }
  json j;
  j["command"] = "identities";
  j["suites"] = json::array();
  for (const auto& s : suites) {
    j["suites"].push_back({{"name", s.name},
                           {"cases", s.cases},
                           {"max_residual", number(s.max_residual)},
                           {"threshold", s.threshold},
                           {"pass", s.pass()}});
  }
  j["all_pass"] = all;
  out << j.dump(2) << '\n';
}

void emit_ed(const RunConfig& c, std::ostream& out) {
  const auto rows = ed::convergence_study(c.lengths, *c.x, c.pinning);
  if (c.format == OutputFormat::csv) {
    out << "L,f_L,f_exact,abs_error,near_degenerate\n";
    for (const auto& r : rows)
      out << r.length << ',' << format_number(r.f_finite) << ',' << format_number(r.f_exact)
          << ',' << format_number(r.abs_error) << ',' << (r.near_degenerate ? "true" : "false")
          << '\n';
    return;
  }
  json j;
  j["command"] = "ed";
  j["x"] = *c.x;
  j["pinning"] = c.pinning == ed::Pinning::neel ? "neel" : "none";
  j["rows"] = json::array();
  for (const auto& r : rows) {
    j["rows"].push_back({{"L", r.length},
                         {"f_L", number(r.f_finite)},
                         {"f_exact", number(r.f_exact)},
                         {"abs_error", number(r.abs_error)},
                         {"near_degenerate", r.near_degenerate}});
  }
  out << j.dump(2) << '\n';
}

void report_error(std::ostream& err, std::string_view code, const std::string& message) {
  json j;
  j["error"] = {{"code", code}, {"message", message}};
  err << j.dump() << '\n';
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void RunConfig::validate() const {
  Tolerance{rel_tol, max_terms}.validate<double>();
  if (threads < 1) throw InvalidSpec("thread count must be >= 1");
  auto check_x = [](double v) {
    if (!(v > 0.0 && v < 1.0)) throw DomainError("x must lie in (0,1), got " + format_number(v));
  };
  auto check_eps = [](double v) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw DomainError("eps must be positive and finite, got " + format_number(v));
  };
  switch (command) {
    case Command::eval:
      if (x.has_value() == eps.has_value())
        throw InvalidSpec("eval needs exactly one of --x or --eps");
      if (x) check_x(*x);
      if (eps) check_eps(*eps);
      break;
    case Command::scan:
    case Command::fit:
      if (grid.count < 1) throw InvalidSpec("grid count must be >= 1");
      if (!(grid.min <= grid.max)) throw InvalidSpec("grid min must not exceed grid max");
      if (grid.coordinate == Coordinate::x) {
        check_x(grid.min);
        check_x(grid.max);
      } else {
        check_eps(grid.min);
        check_eps(grid.max);
      }
      if (command == Command::fit) {
        if (grid.coordinate != Coordinate::eps) throw InvalidSpec("fit runs over an eps grid");
        if (grid.count < 3) throw InvalidSpec("fit needs at least 3 grid points");
        if (!(grid.min < grid.max)) throw InvalidSpec("fit needs eps-min < eps-max");
      }
      break;
    case Command::identities:
      break;
    case Command::ed:
      if (!x) throw InvalidSpec("ed needs --x");
      check_x(*x);
      for (int L : lengths) ed::SpinChainSpec{L, *x, false, pinning}.validate();
      break;
  }
}

std::vector<SuiteResult> run_identity_suites(const Tolerance& tol, unsigned threads) {
  const Tolerance direct{tol.rel_tol, std::max(tol.max_terms, kDirectMaxTerms)};
  std::vector<SuiteResult> suites;
  auto suite = [&](std::string name, double threshold, std::size_t n,
                   const std::function<double(std::size_t)>& residual) {
    const auto values = parallel_map(n, residual, threads);
    SuiteResult s{std::move(name), n, 0.0, threshold};
    for (double v : values) s.max_residual = std::max(s.max_residual, v);
    suites.push_back(std::move(s));
  };

  const std::vector<double> xs9 = linear_spaced(0.1, 0.9, 9);
  const std::vector<double> zs{-0.6, -0.2, 0.2, 0.6};
  const std::vector<int> exps{1, 2, 4};
  struct Case {
    double x, z;
    int b, c;
  };
  std::vector<Case> cases;
  for (double x : xs9)
    for (double z : zs)
      for (int b : exps)
        for (int c : exps) cases.push_back({x, z, b, c});
  const auto qcalc = parallel_map(
      cases.size(),
      [&](std::size_t i) {
        return verify_qcalc_identities(cases[i].x, cases[i].z, cases[i].b, cases[i].c, direct);
      },
      threads);
  SuiteResult doubling{"qcalc_base_doubling", cases.size(), 0.0, 1e-10};
  SuiteResult negation{"qcalc_argument_negation", cases.size(), 0.0, 1e-10};
  for (const auto& r : qcalc) {
    doubling.max_residual = std::max(doubling.max_residual, r.doubling);
    negation.max_residual = std::max(negation.max_residual, r.negation);
  }
  suites.push_back(doubling);
  suites.push_back(negation);

  const auto xs_unit = linear_spaced(0.1, 0.9, 17);
  suite("unit_argument_identity", 1e-10, xs_unit.size(),
        [&](std::size_t i) { return unit_argument_identity_residual(xs_unit[i], direct); });

  const std::vector<double> bs{1.0, 2.0, 4.0, 8.0};
  suite("short_theta_identity", 1e-10, bs.size() * xs9.size(), [&](std::size_t i) {
    const auto p = ModelPoint<double>::from_x(xs9[i % xs9.size()]);
    return short_theta_identity_residual(bs[i / xs9.size()], p, tol);
  });

  const auto xs_mod = linear_spaced(0.3, 0.95, 14);
  suite("modulus_duality", 1e-10, xs_mod.size(), [&](std::size_t i) {
    const auto p = ModelPoint<double>::from_x(xs_mod[i]);
    const double ln_kp = log_modulus_kprime(-p.eps, tol);
    const double ln_k_dual = log_modulus_k(p.ln_x_dual, tol);
    return std::abs(std::expm1(ln_kp - ln_k_dual));
  });

  const auto xs_comp = linear_spaced(0.05, 0.95, 19);
  suite("modulus_complement", 1e-10, xs_comp.size(), [&](std::size_t i) {
    const auto m = moduli(xs_comp[i], tol);
    return std::abs(m.k * m.k + m.kprime * m.kprime - 1.0);
  });

  suite("g_factor_decomposition", 1e-10, xs9.size(), [&](std::size_t i) {
    return decomposition_residual(ModelPoint<double>::from_x(xs9[i]), tol);
  });

  const auto xs_g = linear_spaced(0.1, 0.95, 18);
  suite("g_series_vs_product", 1e-10, xs_g.size(), [&](std::size_t i) {
    const auto p = ModelPoint<double>::from_x(xs_g[i]);
    return std::abs(ln_g_series(p, tol).ln_g - ln_g_product(p, ProductRoute::series, direct));
  });

  const auto xs_path = linear_spaced(0.3, 0.9, 20);
  suite("fidelity_three_routes", 1e-9, xs_path.size(), [&](std::size_t i) {
    const auto p = ModelPoint<double>::from_x(xs_path[i]);
    const double raw = fidelity_raw(p, direct).ln_f;
    const double simplified = fidelity_simplified(p, tol).ln_f;
    const double modular = fidelity_modular(p, tol).ln_f;
    return std::max({std::abs(std::expm1(raw - simplified)),
                     std::abs(std::expm1(modular - simplified)),
                     std::abs(std::expm1(raw - modular))});
  });
  return suites;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
    std::ostringstream buffer;
    switch (config.command) {
      case Command::eval: emit_eval(config, buffer); break;
      case Command::scan: emit_scan(config, buffer); break;
      case Command::fit: emit_fit(config, buffer); break;
      case Command::identities: emit_identities(config, buffer); break;
      case Command::ed: emit_ed(config, buffer); break;
    }
    if (config.output_path) {
      std::ofstream file(*config.output_path, std::ios::binary);
      if (!file) {
        report_error(err, "io_error", "cannot open " + *config.output_path);
        return 1;
      }
      file << buffer.str();
    } else {
      out << buffer.str();
    }
    return 0;
  } catch (const Error& e) {
    report_error(err, e.code(), e.what());
    return e.error_class() == ErrorClass::validation ? 1 : 2;
  } catch (const std::exception& e) {
    report_error(err, "internal_error", e.what());
    return 2;
  }
}

}  // namespace xxzfid::cli
