#include "nvmpr/cli.hpp"

#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "nvmpr/config.hpp"
#include "nvmpr/errors.hpp"
#include "nvmpr/runner.hpp"
#include "nvmpr/sweep_grid.hpp"

namespace nvmpr {

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string format = "json";
  int threads = 1;
};

int execute(Mode mode, const Options& opt, std::ostream& out, std::ostream& err) {
  const GridFormat format = parse_grid_format(opt.format);
  const RunConfig config = load_config(opt.config, mode);

  if (mode == Mode::Sweep) {
    const SweepGrid grid = run_sweep(config, opt.threads);
    if (opt.out.empty()) {
      out << (format == GridFormat::Json ? grid_to_json(grid) : grid_to_csv(grid));
    } else {
      write_grid(grid, opt.out, format);
    }
    if (!grid.flags.empty()) err << "warning: " << grid.flags.size() << " cells flagged (see flags in the output)\n";
    return kExitOk;
  }

  Report report;
  switch (mode) {
    case Mode::Transitions: report = run_transitions(config); break;
    case Mode::Atlas: report = run_atlas(config); break;
    case Mode::OdeCheck: report = run_ode_check(config); break;
    case Mode::Coupling: report = run_coupling(config); break;
    case Mode::Sweep: break;
  }
  if (opt.out.empty()) {
    out << (format == GridFormat::Json ? report_to_json(report) : report_to_csv(report));
  } else {
    write_report(report, opt.out, format);
  }
  if (!report.numerically_ok) {
    err << "error: " << to_string(mode) << " did not converge or exceeded its tolerance\n";
    return kExitNonConvergence;
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"NV/P1 ODMR multiphoton-resonance simulator"};
  app.require_subcommand(1);
  Options opt;

  const std::pair<Mode, const char*> commands[] = {
      {Mode::Transitions, "NV and P1 transition frequencies at one field"},
      {Mode::Atlas, "LAC hyperbolas, peak grid, hyperfine splitting and tripolar rate"},
      {Mode::Sweep, "P_z/P_zs (or its f_LA derivative) over a (B_S, f_LA) grid"},
      {Mode::OdeCheck, "time-domain integration against the closed-form steady state"},
      {Mode::Coupling, "spin-cavity coupling g from a field map"},
  };
  std::vector<std::pair<Mode, CLI::App*>> subs;
  for (const auto& [mode, help] : commands) {
    CLI::App* sub = app.add_subcommand(to_string(mode), help);
    sub->add_option("--config", opt.config, "key = value configuration file")->required();
    sub->add_option("--out", opt.out, "output file (default: stdout)");
    sub->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", opt.threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
    subs.emplace_back(mode, sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfigError;
  }

  Mode mode = Mode::Sweep;
  for (const auto& [m, sub] : subs)
    if (sub->parsed()) mode = m;

  try {
    return execute(mode, opt, out, err);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const InvalidParameter& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const InvalidField& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace nvmpr
