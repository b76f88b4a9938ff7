// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "xxzfid/ed_oracle.hpp"
#include "xxzfid/elliptic.hpp"
#include "xxzfid/fidelity.hpp"
#include "xxzfid/report.hpp"
#include "xxzfid/scaling.hpp"

using namespace xxzfid;
using Point = ModelPoint<double>;

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

int failures = 0;

void report(int id, const char* title, bool pass, const std::string& detail) {
  std::printf("%s %d %s: %s\n", pass ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* pattern, auto... values) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, values...);
  return buf;
}

double gap(double a, double b) { return std::abs(std::expm1(a - b)); }

void three_routes() {
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto p = Point::from_x(0.3 + 0.6 * i / 19.0);
    const double raw = fidelity_raw(p).ln_f, simple = fidelity_simplified(p).ln_f,
                 modular = fidelity_modular(p).ln_f;
    worst = std::max({worst, gap(raw, simple), gap(raw, modular), gap(simple, modular)});
  }
  report(1, "three-route fidelity equivalence", worst < 1e-9,
         fmt("max relative gap %.3e over 20 points in [0.3, 0.9] (limit 1e-9)", worst));
}

void identity_suites() {
  const auto suites = cli::run_identity_suites(default_series_tolerance<double>(), default_thread_count());
  const std::vector<std::string> wanted{"qcalc_base_doubling", "qcalc_argument_negation",
                                        "unit_argument_identity", "short_theta_identity"};
  bool pass = true;
  std::string detail;
  for (const auto& name : wanted) {
    const auto it = std::find_if(suites.begin(), suites.end(), [&](const auto& s) { return s.name == name; });
    if (it == suites.end()) {
      pass = false;
      detail += name + " missing; ";
      continue;
    }
    pass = pass && it->max_residual < 1e-10;
    detail += fmt("%s %.3e (%zu cases); ", name.c_str(), it->max_residual, it->cases);
  }
  detail += "limit 1e-10";
  report(2, "identity suites", pass, detail);
}

void modular_property() {
  double duality = 0.0, complement = 0.0;
  for (int i = 0; i <= 13; ++i) {
    const auto p = Point::from_x(0.3 + 0.05 * i);
    duality = std::max(duality, gap(log_modulus_kprime(-p.eps), log_modulus_k(p.ln_x_dual)));
    const auto m = moduli(p.x);
    complement = std::max(complement, std::abs(m.k * m.k + m.kprime * m.kprime - 1.0));
  }
  report(3, "modular property and complement", duality < 1e-10 && complement < 1e-10,
         fmt("max |k'(x)/k(x~) - 1| %.3e, max |k^2 + k'^2 - 1| %.3e on [0.3, 0.95] (limit 1e-10)",
             duality, complement));
}

void asymptote_recovery() {
  const auto eps = log_spaced(1e-3, 1e-2, 10);
  const auto f = fit_asymptote(minus_ln_f_samples(eps));
  const auto xi = fit_asymptote(ln_xi_samples(eps));
  const double fa = std::abs(f.A / (kPi2 / 16) - 1.0), fb = std::abs(f.B + std::numbers::ln2 / 4);
  const double xa = std::abs(xi.A / (kPi2 / 2) - 1.0), xb = std::abs(xi.B + std::log(4.0));
  report(4, "asymptote recovery", fa < 1e-3 && fb < 1e-3 && xa < 1e-3 && xb < 1e-3,
         fmt("-ln f: A=%.10f (rel %.2e), B=%.10f (abs %.2e); ln xi: A=%.10f (rel %.2e), "
             "B=%.10f (abs %.2e); limits 0.1%% and 1e-3",
             f.A, fa, f.B, fb, xi.A, xa, xi.B, xb));
}

void conjecture() {
  std::vector<double> deviations;
  for (double eps : {1e-2, 1e-3, 1e-4})
    deviations.push_back(std::abs(conjecture_ratio(Point::from_eps(eps)) - conjecture_target()));
  const bool monotone = deviations[1] < deviations[0] && deviations[2] < deviations[1];
  report(5, "conjecture ratio", deviations[2] < 1e-3 && monotone,
         fmt("|ratio - 1/8| = %.3e, %.3e, %.3e at eps = 1e-2, 1e-3, 1e-4 (limit 1e-3, strictly decreasing)",
             deviations[0], deviations[1], deviations[2]));
}

void no_log_term() {
  const auto eps = log_spaced(1e-3, 1e-2, 10);
  const auto fit = fit_with_log_term(minus_ln_f_samples(eps));
  const double d = fit.coefficients[3];
  report(6, "no ln eps correction", std::abs(d) < 1e-3,
         fmt("ln eps coefficient %.3e (limit 1e-3)", d));
}

void ed_oracle() {
  bool split_ok = true;
  for (int length : {4, 6, 8}) {
    const ed::SpinChainSpec spec{length, 0.2, true, ed::Pinning::neel};
    const auto [left, right] = ed::half_chain_models(spec);
    const auto gl = ed::ground_state_dense(ed::build_operator(left, ed::neel_magnetization(1, length / 2)));
    const auto gr = ed::ground_state_dense(
        ed::build_operator(right, ed::neel_magnetization(length / 2 + 1, length)));
    const auto full = ed::ground_state_dense(ed::build_hamiltonian(spec));
    const auto product = ed::tensor_product(gl.state, gr.state, full.state.basis);
    split_ok = split_ok && std::abs(std::abs(ed::overlap(product, full.state)) - 1.0) < 1e-10 &&
               std::abs(full.energy - gl.energy - gr.energy) < 1e-10 * std::abs(full.energy);
  }
  bool parity_ok = true;
  for (int length : {4, 8, 12}) {
    const auto op = ed::build_hamiltonian(ed::SpinChainSpec{length, 0.2});
    const auto dense = ed::ground_state_dense(op);
    const auto lanczos = ed::ground_state_lanczos(op);
    parity_ok = parity_ok && std::abs(lanczos.energy - dense.energy) < 1e-10 * std::abs(dense.energy) &&
                std::abs(std::abs(ed::overlap(dense.state, lanczos.state)) - 1.0) < 1e-10;
  }
  const std::vector<int> lengths{8, 12, 16};
  const auto rows = ed::convergence_study(lengths, 0.2, ed::Pinning::neel);
  const bool decreasing = rows[1].abs_error < rows[0].abs_error && rows[2].abs_error < rows[1].abs_error;
  const double rel16 = rows[2].abs_error / rows[2].f_exact;
  report(7, "finite-chain oracle", split_ok && parity_ok && decreasing && rel16 < 0.02,
         fmt("f_L = %.6f, %.6f, %.6f at L = 8, 12, 16 vs f = %.6f; errors %.2e, %.2e, %.2e "
             "(strictly decreasing: %s; L=16 relative %.2f%%, target 2%%); split factorization %s; "
             "dense/Lanczos parity %s",
             rows[0].f_finite, rows[1].f_finite, rows[2].f_finite, rows[0].f_exact, rows[0].abs_error,
             rows[1].abs_error, rows[2].abs_error, decreasing ? "yes" : "no", 100 * rel16,
             split_ok ? "ok" : "broken", parity_ok ? "ok" : "broken"));
}

void trivial_limits() {
  const double f0 = fidelity(Point::from_x(1e-6)).f;
  std::vector<double> slopes;
  for (double eps : {1e-2, 1e-3, 1e-4})
    slopes.push_back((ln_g_series(Point::from_eps(eps)).ln_g - std::numbers::ln2 / 4) / eps);
  const double at_1e4 = slopes[2] * 1e-4;
  // O(eps): deviation / eps settles to a constant
  const bool linear = std::abs(slopes[2] / slopes[1] - 1.0) < 0.05 && std::abs(slopes[1] / slopes[0] - 1.0) < 0.05;
  report(8, "trivial limits", std::abs(f0 - 1.0) < 1e-11 && linear && at_1e4 > 0 && at_1e4 < 1e-3,
         fmt("|f(1e-6) - 1| = %.3e (limit 1e-11); (ln g - ln(2)/4)/eps = %.5f, %.5f, %.5f at eps = 1e-2, "
             "1e-3, 1e-4",
             std::abs(f0 - 1.0), slopes[0], slopes[1], slopes[2]));
}

template <class F>
void guarded(int id, const char* title, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, title, false, std::string("threw: ") + e.what());
  }
}

}  // namespace

int main() {
  guarded(1, "three-route fidelity equivalence", three_routes);
  guarded(2, "identity suites", identity_suites);
  guarded(3, "modular property and complement", modular_property);
  guarded(4, "asymptote recovery", asymptote_recovery);
  guarded(5, "conjecture ratio", conjecture);
  guarded(6, "no ln eps correction", no_log_term);
  guarded(7, "finite-chain oracle", ed_oracle);
  guarded(8, "trivial limits", trivial_limits);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
