// xxzfid: bipartite fidelity and correlation length of the infinite XXZ chain.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include "xxzfid/report.hpp"

namespace cli = xxzfid::cli;

namespace {

void add_tolerance(CLI::App* cmd, cli::RunConfig& c) {
  cmd->add_option("--rel-tol", c.rel_tol, "Target relative tolerance of products and series");
  cmd->add_option("--max-terms", c.max_terms, "Term cap for series evaluations");
}

void add_format(CLI::App* cmd, cli::RunConfig& c) {
  static const std::map<std::string, cli::OutputFormat> formats{
      {"json", cli::OutputFormat::json}, {"csv", cli::OutputFormat::csv}};
  cmd->add_option("--format", c.format, "Output format")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  cmd->add_option("-o,--output", c.output_path, "Write the report to this file");
}

}  // namespace

int main(int argc, char** argv) {
  cli::RunConfig config;
  if (const char* threads = std::getenv("THREADS")) {
    const long n = std::strtol(threads, nullptr, 10);
    if (n >= 1) config.threads = static_cast<unsigned>(n);
  }

  CLI::App app{"Exact bipartite fidelity of the infinite antiferromagnetic XXZ chain"};
  app.require_subcommand(1);

  double eps_min = 0.0, eps_max = 0.0, x_min = 0.0, x_max = 0.0;
  std::size_t count = 0;
  std::string spacing = "linear";

  auto* eval = app.add_subcommand("eval", "Evaluate f, xi and -ln f / ln xi at one point");
  auto* ex = eval->add_option("--x", config.x, "Anisotropy parameter x in (0,1)");
  auto* ee = eval->add_option("--eps", config.eps, "eps = -ln x > 0");
  ex->excludes(ee);
  eval->add_flag("--cross-check", config.cross_check, "Cross-check both routes in [0.6, 0.9]");
  add_tolerance(eval, config);
  add_format(eval, config);

  auto* scan = app.add_subcommand("scan", "Evaluate a grid of points");
  auto* sxmin = scan->add_option("--x-min", x_min);
  auto* sxmax = scan->add_option("--x-max", x_max);
  auto* semin = scan->add_option("--eps-min", eps_min);
  auto* semax = scan->add_option("--eps-max", eps_max);
  sxmin->excludes(semin)->excludes(semax);
  sxmax->excludes(semin)->excludes(semax);
  scan->add_option("--count", count, "Number of grid points")->required();
  scan->add_option("--spacing", spacing, "linear or log")
      ->check(CLI::IsMember({"linear", "log"}));
  scan->add_flag("--cross-check", config.cross_check);
  add_tolerance(scan, config);
  add_format(scan, config);

  auto* fit = app.add_subcommand("fit", "Fit -ln f and ln xi to A/eps + B + C eps");
  fit->add_option("--eps-min", eps_min)->default_val(1e-3);
  fit->add_option("--eps-max", eps_max)->default_val(1e-2);
  fit->add_option("--count", count)->default_val(10);
  add_tolerance(fit, config);
  add_format(fit, config);

  auto* identities = app.add_subcommand("identities", "Run every identity residual suite");
  add_tolerance(identities, config);
  add_format(identities, config);

  auto* ed = app.add_subcommand("ed", "Finite-chain exact diagonalization study");
  ed->add_option("--x", config.x)->required();
  ed->add_option("--lengths,-L", config.lengths, "Even chain lengths")
      ->delimiter(',')
      ->default_str("8,12,16");
  std::string pinning = "neel";
  ed->add_option("--pinning", pinning)->check(CLI::IsMember({"neel", "none"}));
  add_format(ed, config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "{\"error\":{\"code\":\"usage\",\"message\":\"" << e.what() << "\"}}\n";
    return 1;
  }

  if (eval->parsed()) {
    config.command = cli::Command::eval;
  } else if (scan->parsed()) {
    config.command = cli::Command::scan;
    const bool by_eps = semin->count() > 0 || semax->count() > 0;
    config.grid = {by_eps ? cli::Coordinate::eps : cli::Coordinate::x,
                   by_eps ? eps_min : x_min, by_eps ? eps_max : x_max, count,
                   spacing == "log" ? cli::Spacing::log : cli::Spacing::linear};
  } else if (fit->parsed()) {
    config.command = cli::Command::fit;
    config.grid = {cli::Coordinate::eps, eps_min, eps_max, count, cli::Spacing::log};
  } else if (identities->parsed()) {
    config.command = cli::Command::identities;
  } else {
    config.command = cli::Command::ed;
    if (config.lengths.empty()) config.lengths = {8, 12, 16};
    config.pinning = pinning == "none" ? xxzfid::ed::Pinning::none : xxzfid::ed::Pinning::neel;
  }
  return cli::run(config, std::cout, std::cerr);
}
