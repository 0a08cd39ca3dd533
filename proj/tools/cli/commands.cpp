#include "commands.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "csv.hpp"
#include "gridflex/allocation.hpp"
#include "gridflex/caseio.hpp"
#include "gridflex/contingency.hpp"
#include "gridflex/repression.hpp"

namespace gridflex::cli {

namespace {

namespace fs = std::filesystem;

struct Common {
  std::string case_path;
  std::uint64_t seed = 0;
  int alpha_points = 21;
  int threads = 1;
  std::string output_dir = ".";
  bool lenient = false;
  int multistarts = 16;
  double device_range = std::numeric_limits<double>::quiet_NaN();
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("case", c.case_path, "Case file (.gfcase)")->required();
  cmd->add_option("--seed", c.seed, "Multistart seed");
  cmd->add_option("--alpha-points", c.alpha_points, "Uniform alpha grid size")->check(CLI::Range(2, 100001));
  cmd->add_option("--threads", c.threads, "Worker threads (default: GRIDFLEX_THREADS or 1)")
      ->check(CLI::Range(1, 1024));
  cmd->add_option("--output-dir", c.output_dir, "Directory for CSV/TXT outputs");
  cmd->add_flag("--lenient", c.lenient, "Warn instead of failing on unknown case fields");
  cmd->add_option("--multistarts", c.multistarts, "Starts per adjustable-susceptance solve")
      ->check(CLI::Range(1, 100000));
  cmd->add_option("--device-range", c.device_range,
                  "Replace every candidate line's device range with [-R, R]")
      ->check(CLI::Range(0.0, -kBetaFloor));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::vector<double> parse_numbers(const std::string& text, const char* what) {
  std::vector<double> out;
  for (const std::string& s : split_list(text)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || !std::isfinite(v)) throw InputError(std::string("bad ") + what + " value: " + s);
    out.push_back(v);
  }
  if (out.empty()) throw InputError(std::string("empty ") + what + " list");
  return out;
}

StrategyKind parse_kind(const std::string& text) {
  auto k = parse_strategy_kind(text);
  if (!k) throw InputError("unknown strategy: " + text);
  return *k;
}

std::vector<StrategyKind> parse_kinds(const std::string& text) {
  std::vector<StrategyKind> out;
  for (const std::string& s : split_list(text)) out.push_back(parse_kind(s));
  if (out.empty()) throw InputError("empty strategy list");
  return out;
}

struct Study {
  Network net;
  AlphaGrid grid = AlphaGrid::uniform(21);
  SolverSettings settings;
  fs::path out_dir;
};

Study prepare(const Common& c, std::ostream& err) {
  std::vector<std::string> warnings;
  ParseOptions po;
  po.lenient = c.lenient;
  po.warnings = &warnings;
  if (!fs::exists(c.case_path)) throw InputError("case file not found: " + c.case_path);
  CaseFile cf = load_case(c.case_path, po);
  for (const std::string& w : warnings) err << "warning: " << w << '\n';
  Study s;
  s.net = std::isnan(c.device_range) ? cf.network : with_device_range(cf.network, -c.device_range, c.device_range);
  s.grid = AlphaGrid::uniform(c.alpha_points);
  s.settings.seed = c.seed;
  s.settings.threads = c.threads;
  s.settings.multistarts = c.multistarts;
  s.out_dir = c.output_dir;
  std::error_code ec;
  fs::create_directories(s.out_dir, ec);
  if (ec) throw InputError("cannot create output directory " + c.output_dir);
  return s;
}

// Unrepressed prints 0; undefined studies print nothing.
std::string degree_field(const RepressionDegree& d, bool defined) {
  return defined ? format_number(d.repressed ? d.degree : 0.0) : "";
}

int cmd_lr(const Common& c, const std::string& strategy, double capacity, double budget, std::ostream& out,
           std::ostream& err) {
  const Study s = prepare(c, err);
  RepressionOptions opts;
  if (!std::isnan(budget)) opts.budget = budget;
  const RepressionResult r = compute_repression(s.net, {parse_kind(strategy), capacity}, s.grid, s.settings, opts);

  CsvTable summary({"bus", "direction", "LR_MW", "degree"});
  CsvTable envelope({"bus", "alpha", "forecast_lo", "forecast_hi", "achieved_lo", "achieved_hi"});
  for (const BusRepression& b : r.buses) {
    if (!b.has_demand) continue;
    const std::string id = std::to_string(b.bus_id);
    summary.add({id, "increase", format_number(b.lr_up), degree_field(b.degree_max, r.defined())});
    summary.add({id, "reduction", format_number(b.lr_down), degree_field(b.degree_min, r.defined())});
    for (const EnvelopePoint& e : b.envelope)
      envelope.add({id, format_number(e.alpha), format_number(e.forecast.lower), format_number(e.forecast.upper),
                    format_number(e.achieved.lower), format_number(e.achieved.upper)});
  }
  summary.write(s.out_dir / "lr_summary.csv");
  envelope.write(s.out_dir / "envelope.csv");

  if (!r.defined()) {
    err << "error: infeasible alpha levels:";
    for (double a : r.infeasible_alphas) err << ' ' << format_number(a);
    err << '\n';
    return kInfeasibleLevels;
  }
  out << "total LR " << format_number(r.total_lr) << " MW (increase " << format_number(r.total_lr_up)
      << ", reduction " << format_number(r.total_lr_down) << ")\n";
  return kOk;
}

int cmd_sweep(const Common& c, const std::string& strategies, const std::string& capacities, std::ostream& out,
              std::ostream& err) {
  const Study s = prepare(c, err);
  const auto cells = capacity_sweep(s.net, parse_kinds(strategies), parse_numbers(capacities, "capacity"), s.grid,
                                    s.settings);
  CsvTable t({"strategy", "capacity", "total_LR_MW"});
  bool defined = true;
  for (const SweepCell& cell : cells) {
    t.add({to_string(cell.kind), format_number(cell.capacity), format_number(cell.total_lr)});
    defined = defined && cell.defined;
    out << to_string(cell.kind) << ' ' << format_number(cell.capacity) << ' ' << format_number(cell.total_lr) << '\n';
  }
  t.write(s.out_dir / "sweep.csv");
  if (!defined) {
    err << "error: some studies have infeasible alpha levels\n";
    return kInfeasibleLevels;
  }
  return kOk;
}

int cmd_contingency(const Common& c, const std::string& strategies, const std::string& capacities,
                    const std::string& only, bool no_intact, std::ostream& out, std::ostream& err) {
  const Study s = prepare(c, err);
  ContingencyOptions opts;
  opts.include_intact = !no_intact;
  opts.only = split_list(only);
  for (const std::string& label : opts.only)
    if (s.net.find_line(label) < 0) throw InputError("unknown line in --only: " + label);
  const ContingencyTable table = n_minus_1(s.net, parse_kinds(strategies), parse_numbers(capacities, "capacity"),
                                           s.grid, s.settings, opts);
  CsvTable t({"outage", "strategy", "capacity", "total_LR_MW", "worst_bus", "worst_bus_LR_MW"});
  bool defined = true;
  for (const OutageEntry& e : table.entries) {
    if (e.islanding) {
      t.add({e.label, "islanding", "", "", "", ""});
      continue;
    }
    for (const OutageCell& cell : e.cells) {
      defined = defined && cell.defined;
      t.add({e.label, to_string(cell.kind), format_number(cell.capacity), format_number(cell.total_lr),
             cell.worst_bus_id ? std::to_string(cell.worst_bus_id) : "",
             cell.worst_bus_id ? format_number(cell.worst_bus_lr) : ""});
    }
  }
  t.write(s.out_dir / "n1.csv");
  for (std::size_t i = 0; i < table.entries.size() && i < 5; ++i) {
    const OutageEntry& e = table.entries[i];
    out << e.label << (e.islanding ? " islanding" : " base LR " + format_number(e.base_lr())) << '\n';
  }
  if (!defined) {
    err << "error: some outages have infeasible alpha levels\n";
    return kInfeasibleLevels;
  }
  return kOk;
}

int cmd_allocate(const Common& c, const std::string& strategy, double capacity, const std::string& taus,
                 int tau_points, const std::string& outage, std::ostream& out, std::ostream& err) {
  const Study s = prepare(c, err);
  const Strategy st{parse_kind(strategy), capacity};
  std::optional<int> outage_index;
  if (!outage.empty()) {
    const int k = s.net.find_line(outage);
    if (k < 0) throw InputError("unknown line in --outage: " + outage);
    outage_index = k;
  }
  const std::vector<double> tau_values =
      taus.empty() ? default_tau_values(outage_index ? with_outage(s.net, *outage_index) : s.net, st, tau_points)
                   : parse_numbers(taus, "tau");
  const AllocationResult r = allocate(s.net, st, tau_values, outage_index, s.grid, s.settings);
  const Network study = outage_index ? with_outage(s.net, *outage_index) : s.net;
  const std::vector<Interval> bounds = effective_beta_bounds(study, st);

  CsvTable t({"tau", "line", "beta", "total_LR_MW"});
  bool defined = true;
  for (const AllocationPoint& p : r.points) {
    defined = defined && p.defined;
    for (std::size_t k = 0; k < study.lines.size(); ++k) {
      if (bounds[k].lower >= bounds[k].upper) continue;
      t.add({format_number(p.tau), line_label(study.lines[k]), format_number(p.beta[k]), format_number(p.total_lr)});
    }
  }
  t.write(s.out_dir / "alloc.csv");
  std::ofstream order(s.out_dir / "activation_order.txt", std::ios::binary);
  if (!order) throw InputError("cannot write activation_order.txt");
  for (std::size_t i = 0; i < r.activation_order.size(); ++i) {
    const Activation& a = r.activation_order[i];
    order << i + 1 << ' ' << a.label << " tau=" << format_number(a.tau) << (a.ambiguous ? " ambiguous" : "") << '\n';
  }
  for (const AllocationPoint& p : r.points)
    out << "tau " << format_number(p.tau) << " LR " << format_number(p.total_lr) << '\n';
  if (!defined) {
    err << "error: some budgets have infeasible alpha levels\n";
    return kInfeasibleLevels;
  }
  return kOk;
}

int cmd_verify(const Common& c, const std::string& strategy, double capacity, double alpha,
               const std::string& direction, int grid_points, double tolerance, std::ostream& out,
               std::ostream& err) {
  const Study s = prepare(c, err);
  if (direction != "min" && direction != "max") throw InputError("direction must be min or max");
  if (alpha < 0.0 || alpha > 1.0) throw InputError("alpha must lie in [0, 1]");
  const BilinearProblem p{s.net, alpha, direction == "max" ? Direction::Max : Direction::Min,
                          {parse_kind(strategy), capacity}, {}, {}};
  const AlphaCutSolution sol = solve_mfacts(p, s.settings);
  const OracleResult oracle = brute_force_oracle(p, grid_points);
  if (!sol.optimal() || oracle.status != SolveStatus::Optimal) {
    err << "error: cut is infeasible (solver " << to_string(sol.status) << ", oracle " << to_string(oracle.status)
        << ")\n";
    return kInfeasibleLevels;
  }
  const double gap = std::abs(sol.objective - oracle.objective);
  const double allowed = tolerance * std::max(1.0, std::abs(oracle.objective));
  out << "solver " << format_number(sol.objective) << " MW\n"
      << "oracle " << format_number(oracle.objective) << " MW (" << oracle.lp_solves << " LPs)\n"
      << "gap " << format_number(gap) << " MW (allowed " << format_number(allowed) << ")\n";
  return gap > allowed ? kVerifyGapExceeded : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Load repression studies on DC networks with adjustable line susceptances", "gridflex"};
  app.require_subcommand(1);

  int default_threads = 1;
  if (const char* env = std::getenv("GRIDFLEX_THREADS")) {
    try {
      default_threads = std::stoi(env);
    } catch (const std::exception&) {
      default_threads = 0;
    }
    if (default_threads < 1) {
      err << "error: GRIDFLEX_THREADS must be a positive integer\n";
      return kInputError;
    }
  }

  Common common;
  common.threads = default_threads;
  std::string strategy = "smart", strategies = "base,inductive,capacitive,smart";
  std::string capacities = "0,0.1,0.2,0.3,0.4", n1_capacities = "0.2", only, taus, outage, direction = "max";
  double capacity = 0.2, budget = std::numeric_limits<double>::quiet_NaN(), alpha = 0.0, tolerance = 1e-3;
  int tau_points = 20, grid_points = 5;
  bool no_intact = false;

  CLI::App* lr = app.add_subcommand("lr", "Load repression of one strategy");
  add_common(lr, common);
  lr->add_option("--strategy", strategy, "base|inductive|capacitive|smart or c1..c4");
  lr->add_option("--capacity", capacity, "Device capacity (fraction)")->check(CLI::Range(0.0, -kBetaFloor));
  lr->add_option("--budget", budget, "Total device budget sum |beta|")->check(CLI::NonNegativeNumber);

  CLI::App* sweep = app.add_subcommand("sweep", "Total LR versus device capacity");
  add_common(sweep, common);
  sweep->add_option("--strategies", strategies, "Comma-separated strategies");
  sweep->add_option("--capacities", capacities, "Comma-separated capacities");

  CLI::App* n1 = app.add_subcommand("contingency", "Single-line outage screening");
  add_common(n1, common);
  n1->add_option("--strategies", strategies, "Comma-separated strategies");
  n1->add_option("--capacities", n1_capacities, "Comma-separated capacities");
  n1->add_option("--only", only, "Comma-separated outage lines (e.g. 15-24,3-24)");
  n1->add_flag("--no-intact", no_intact, "Omit the intact-network row");

  CLI::App* alloc = app.add_subcommand("allocate", "Budget-constrained device deployment");
  add_common(alloc, common);
  alloc->add_option("--strategy", strategy, "Strategy");
  alloc->add_option("--capacity", capacity, "Device capacity (fraction)")->check(CLI::Range(0.0, -kBetaFloor));
  alloc->add_option("--taus", taus, "Comma-separated budgets (ascending)");
  alloc->add_option("--tau-points", tau_points, "Uniform budgets up to the full range")->check(CLI::Range(1, 10000));
  alloc->add_option("--outage", outage, "Line taken out of service first");

  CLI::App* verify = app.add_subcommand("verify", "Compare the solver with the brute-force oracle on one cut");
  add_common(verify, common);
  verify->add_option("--strategy", strategy, "Strategy");
  verify->add_option("--capacity", capacity, "Device capacity (fraction)")->check(CLI::Range(0.0, -kBetaFloor));
  verify->add_option("--alpha", alpha, "Alpha level");
  verify->add_option("--direction", direction, "min or max");
  verify->add_option("--grid-points", grid_points, "Oracle grid points per line")->check(CLI::Range(2, 1000));
  verify->add_option("--tolerance", tolerance, "Allowed gap as a fraction of max(1 MW, |oracle|)")
      ->check(CLI::NonNegativeNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    if (lr->parsed()) return cmd_lr(common, strategy, capacity, budget, out, err);
    if (sweep->parsed()) return cmd_sweep(common, strategies, capacities, out, err);
    if (n1->parsed()) return cmd_contingency(common, strategies, n1_capacities, only, no_intact, out, err);
    if (alloc->parsed()) return cmd_allocate(common, strategy, capacity, taus, tau_points, outage, out, err);
    if (verify->parsed())
      return cmd_verify(common, strategy, capacity, alpha, direction, grid_points, tolerance, out, err);
  } catch (const CaseError& e) {
    err << "error: " << common.case_path << ": " << e.what() << '\n';
    return kInputError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const OracleCapExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace gridflex::cli
