#include "cli.hpp"

#include "ptwalk/combine.hpp"
#include "ptwalk/diagnostics.hpp"
#include "ptwalk/error.hpp"
#include "ptwalk/trace_io.hpp"
#include "ptwalk/twalk.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

namespace ptwalk::cli {

std::size_t
parse_count(const std::string& text, const std::string& what)
{
  double v = 0.0;
  try {
    v = parse_real(text);
  } catch (const std::exception&) {
    throw InputError(what + ": '" + text + "' is not a number");
  }
  if (!(v >= 0.0) || v != std::floor(v) || v > 9.0e15)
    throw InputError(what + ": '" + text + "' is not a non-negative integer");
  return static_cast<std::size_t>(v);
}

namespace {

struct RunOpts
{
  std::string target = "example1";
  std::string iters = "1e5";
  std::string thin = "1";
  std::uint64_t seed = 1;
  std::string penalty = "rejection";
  double penalty_prob = 0.1;
  double kappa = 3.0;
  std::string shape = "t";
  double shape_df = 2.0;
  std::string proposal = "t";
  double proposal_df = 1.0;
  int max_trials = 10000;
  std::vector<double> x0, y0;
  std::string burn_in = "0";
  std::string out;
};

struct Table1Opts
{
  std::vector<int> dims{ 2, 4, 8, 16 };
  std::vector<double> kappas{ 2.0, 3.0, 4.0 };
  std::vector<std::string> shapes{ "gaussian", "t" };
  double shape_df = 2.0;
  std::string n = "1e6";
  std::uint64_t seed = 1;
  std::string out;
};

struct CombineOpts
{
  std::string a, b;
  std::string target = "example1_weighted";
  std::string iters = "1e5";
  std::uint64_t seed = 1;
  std::string burn_in = "0";
  std::string bandwidth = "scott";
  std::string out;
};

struct DiagOpts
{
  std::string trace;
  std::string header;
  std::string target;
  std::string burn_in = "0";
  std::vector<int> dims{ 0, 1 };
  int resolution = 100;
  std::string out;
};

struct DrawOpts
{
  std::string target = "example1_weighted";
  std::size_t component = 0;
  std::string n = "1e4";
  std::uint64_t seed = 1;
  std::string out;
};

PenaltyShape
shape_from(const std::string& name, double df)
{
  if (name == "gaussian")
    return PenaltyShape::gaussian();
  if (name == "t")
    return PenaltyShape::student_t(df);
  if (name == "rational")
    return PenaltyShape::rational();
  if (name == "bump")
    return PenaltyShape::bump();
  throw ConfigError("penalty shape '" + name + "' (expected gaussian, t, rational or bump)");
}

ProposalFamily
proposal_from(const std::string& name, double df)
{
  if (name == "gaussian")
    return ProposalFamily::gaussian();
  if (name == "t")
    return ProposalFamily::student_t(df);
  throw ConfigError("proposal '" + name + "' (expected gaussian or t)");
}

Point
to_point(const std::vector<double>& v)
{
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::filesystem::path
with_suffix(const std::string& prefix, const char* suffix)
{
  return std::filesystem::path(prefix + suffix);
}

void
cmd_run(const RunOpts& o, std::ostream& out)
{
  const TargetDensity target = resolve_target(o.target);
  KernelConfig cfg;
  cfg.seed = o.seed;
  cfg.penalty_prob = o.penalty_prob;
  if (o.penalty == "none")
    cfg.penalty_prob = 0.0;
  else if (o.penalty == "gradient")
    cfg.penalty.variant = PenaltyVariant::gradient;
  else if (o.penalty == "rejection")
    cfg.penalty.variant = PenaltyVariant::rejection;
  else
    throw ConfigError("--penalty: '" + o.penalty + "' (expected rejection, gradient or none)");
  cfg.penalty.kappa = o.kappa;
  cfg.penalty.shape = shape_from(o.shape, o.shape_df);
  cfg.penalty.proposal = proposal_from(o.proposal, o.proposal_df);
  cfg.penalty.max_trials = o.max_trials;
  cfg.validate();
  if (cfg.penalty_prob > 0.0 && cfg.penalty.variant == PenaltyVariant::gradient &&
      !target.has_gradient())
    throw ConfigError("gradient penalty needs a target with a gradient");

  const std::size_t iters = parse_count(o.iters, "--iters");
  const std::size_t thin = parse_count(o.thin, "--thin");
  const std::size_t burn_in = parse_count(o.burn_in, "--burn-in");
  if (iters < 1)
    throw InputError("--iters must be at least 1");
  if (thin < 1)
    throw InputError("--thin must be at least 1");

  const int d = target.dim();
  Point x0 = o.x0.empty() ? (target.mode_centres().empty() ? Point::Zero(d)
                                                            : target.mode_centres().front())
                          : to_point(o.x0);
  Point y0 = o.y0.empty() ? Point(x0.array() + 1.0) : to_point(o.y0);
  if (x0.size() != d || y0.size() != d)
    throw InputError("--x0/--y0 must have " + std::to_string(d) + " entries");

  const Trace trace = run(target, cfg, x0, y0, iters, thin);
  write_trace_csv(with_suffix(o.out, ".csv"), trace);
  write_json(with_suffix(o.out, ".header.json"), trace_header(trace));
  const DiagnosticsReport rep =
    make_report(trace, target.mode_centres(), std::min(burn_in, iters - 1));
  write_json(with_suffix(o.out, ".diag.json"), to_json(rep));
  out << "global acceptance " << rep.global_acceptance << ", occupancy";
  for (double f : rep.mode_occupancy)
    out << ' ' << f;
  out << '\n';
}

void
cmd_table1(const Table1Opts& o, std::ostream& out)
{
  const std::size_t n = parse_count(o.n, "--n");
  if (n < 10000)
    throw InputError("--n must be at least 1e4");
  std::ofstream file;
  if (!o.out.empty()) {
    file.open(o.out);
    if (!file)
      throw DataError("cannot write '" + o.out + "'");
  }
  std::ostream& dst = o.out.empty() ? out : file;
  dst << "penalty_shape,proposal,d,kappa,n,z_hat,std_err\n";
  std::uint64_t cell = 0;
  for (const auto& shape : o.shapes)
    for (int d : o.dims)
      for (double kappa : o.kappas) {
        PenaltyConfig pc;
        pc.shape = shape_from(shape, o.shape_df);
        pc.proposal = ProposalFamily::student_t(1.0);
        pc.kappa = kappa;
        pc.validate();
        if (d < 1)
          throw InputError("--d entries must be positive");
        Rng rng(o.seed, streams::table1_base + cell++);
        const NormConstEstimate e = normconst_mc(pc, d, static_cast<long long>(n), rng);
        dst << shape << ",t1," << d << ',' << format_real(kappa) << ',' << n << ','
            << format_real(e.z_hat) << ',' << format_real(e.std_err) << '\n';
      }
}

LooKdeConfig
bandwidth_from(const std::string& s)
{
  LooKdeConfig cfg;
  if (s == "scott")
    cfg.rule = BandwidthRule::scott;
  else if (s == "silverman")
    cfg.rule = BandwidthRule::silverman;
  else {
    try {
      cfg.fixed_h = parse_real(s);
    } catch (const std::exception&) {
      throw ConfigError("--bandwidth: '" + s + "' (expected scott, silverman or a number)");
    }
    cfg.rule = BandwidthRule::fixed;
  }
  return cfg;
}

void
cmd_combine(const CombineOpts& o, std::ostream& out, std::ostream& err)
{
  const std::size_t iters = parse_count(o.iters, "--iters");
  if (iters < 1)
    throw InputError("--iters must be at least 1");
  const std::size_t burn_in = parse_count(o.burn_in, "--burn-in");
  const TargetDensity target = resolve_target(o.target);
  const LooKdeConfig kde = bandwidth_from(o.bandwidth);
  const RegionSample s1 = make_region_sample(read_points(o.a, burn_in), 1, target);
  const RegionSample s2 = make_region_sample(read_points(o.b, burn_in), 2, target);
  Rng rng(o.seed, streams::combine);
  const CombineResult res = combine_run(s1, s2, kde, iters, rng);
  if (res.overlap_warning)
    err << "warning: samples overlap within one bandwidth; region weights may be biased\n";
  write_combined_csv(with_suffix(o.out, ".csv"), res.trace, s1, s2);
  nlohmann::json summary = summary_json(res);
  summary["seed"] = o.seed;
  summary["sizes"] = { s1.size(), s2.size() };
  write_json(with_suffix(o.out, ".summary.json"), summary);
  out << "acceptance " << res.acceptance << ", occupancy " << res.occupancy[0] << ' '
      << res.occupancy[1] << '\n';
}

void
cmd_diag(const DiagOpts& o, std::ostream& out)
{
  std::filesystem::path header = o.header;
  if (header.empty()) {
    std::filesystem::path guess = o.trace;
    guess.replace_extension(".header.json");
    if (std::filesystem::exists(guess))
      header = guess;
  }
  const Trace trace = read_trace(o.trace, header);
  std::string target_name = o.target.empty() ? trace.target_name : o.target;
  std::vector<Point> centres;
  if (!target_name.empty())
    centres = resolve_target(target_name).mode_centres();
  const std::size_t burn_in = parse_count(o.burn_in, "--burn-in");
  const DiagnosticsReport rep = make_report(trace, centres, burn_in);
  write_json(with_suffix(o.out, ".diag.json"), to_json(rep));

  if (o.dims.size() != 2)
    throw InputError("--dims needs exactly two coordinates");
  const auto xs = retained_x(trace, burn_in);
  const int d = xs.empty() ? 0 : static_cast<int>(xs.front().size());
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(xs.size()), d);
  for (std::size_t i = 0; i < xs.size(); ++i)
    pts.row(static_cast<Eigen::Index>(i)) = xs[i].transpose();
  const KdeGrid grid = kde_grid(pts, { o.dims[0], o.dims[1] }, o.resolution);
  write_kde_grid_csv(with_suffix(o.out, ".kde.csv"), grid);
  out << "retained " << rep.retained << ", global acceptance " << rep.global_acceptance
      << '\n';
}

void
cmd_draw(const DrawOpts& o)
{
  const GaussianMixtureSpec spec = [&] {
    for (const auto& name : builtin_names())
      if (name == o.target)
        return builtin_spec(name);
    std::ifstream in(o.target);
    if (!in)
      throw ConfigError("target '" + o.target + "' is neither a builtin nor a readable file");
    return parse_target_spec(std::string(std::istreambuf_iterator<char>(in), {}));
  }();
  Rng rng(o.seed, streams::draw);
  write_points(o.out, draw_component(spec, o.component, parse_count(o.n, "--n"), rng));
}

} // namespace

int
run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{ "Penalised t-walk sampler and KDE mode combiner" };
  app.set_config("--config", "", "TOML/INI file; command-line flags override it");
  app.require_subcommand(1);

  RunOpts ro;
  auto* run_cmd = app.add_subcommand("run", "Run a chain and write trace, header and diagnostics");
  run_cmd->add_option("--target", ro.target, "Builtin target or mixture spec file")
    ->capture_default_str();
  run_cmd->add_option("--iters", ro.iters, "Iterations (5e5 style accepted)")->capture_default_str();
  run_cmd->add_option("--thin", ro.thin)->capture_default_str();
  run_cmd->add_option("--seed", ro.seed)->capture_default_str();
  run_cmd->add_option("--penalty", ro.penalty, "rejection, gradient or none")->capture_default_str();
  run_cmd->add_option("--penalty-prob", ro.penalty_prob)->capture_default_str();
  run_cmd->add_option("--kappa", ro.kappa)->capture_default_str();
  run_cmd->add_option("--penalty-shape", ro.shape, "gaussian, t, rational or bump")
    ->capture_default_str();
  run_cmd->add_option("--penalty-df", ro.shape_df)->capture_default_str();
  run_cmd->add_option("--proposal", ro.proposal, "gaussian or t")->capture_default_str();
  run_cmd->add_option("--proposal-df", ro.proposal_df)->capture_default_str();
  run_cmd->add_option("--max-trials", ro.max_trials)->capture_default_str();
  run_cmd->add_option("--x0", ro.x0, "Initial x (default: first mode centre)")->delimiter(',');
  run_cmd->add_option("--y0", ro.y0, "Initial y (default: x0 + 1)")->delimiter(',');
  run_cmd->add_option("--burn-in", ro.burn_in, "Burn-in for the diagnostics report")
    ->capture_default_str();
  run_cmd->add_option("--out", ro.out, "Output prefix")->required();

  Table1Opts to;
  auto* t1_cmd = app.add_subcommand("table1", "Monte Carlo normalising constants over (shape, d, kappa)");
  t1_cmd->add_option("--d", to.dims)->delimiter(',')->capture_default_str();
  t1_cmd->add_option("--kappa", to.kappas)->delimiter(',')->capture_default_str();
  t1_cmd->add_option("--shapes", to.shapes)->delimiter(',')->capture_default_str();
  t1_cmd->add_option("--penalty-df", to.shape_df)->capture_default_str();
  t1_cmd->add_option("--n", to.n, "Draws per cell")->capture_default_str();
  t1_cmd->add_option("--seed", to.seed)->capture_default_str();
  t1_cmd->add_option("--out", to.out, "CSV path (default: stdout)");

  CombineOpts co;
  auto* comb_cmd = app.add_subcommand("combine", "Merge two regional samples by jumping modes");
  comb_cmd->add_option("--a", co.a, "Region 1 trace or point CSV")->required();
  comb_cmd->add_option("--b", co.b, "Region 2 trace or point CSV")->required();
  comb_cmd->add_option("--target", co.target)->capture_default_str();
  comb_cmd->add_option("--iters", co.iters)->capture_default_str();
  comb_cmd->add_option("--seed", co.seed)->capture_default_str();
  comb_cmd->add_option("--burn-in", co.burn_in)->capture_default_str();
  comb_cmd->add_option("--bandwidth", co.bandwidth, "scott, silverman or a fixed value")
    ->capture_default_str();
  comb_cmd->add_option("--out", co.out, "Output prefix")->required();

  DiagOpts dop;
  auto* diag_cmd = app.add_subcommand("diag", "Diagnostics report and KDE grid for a trace");
  diag_cmd->add_option("--trace", dop.trace)->required();
  diag_cmd->add_option("--header", dop.header, "Sidecar JSON (default: next to the trace)");
  diag_cmd->add_option("--target", dop.target, "Overrides the target named in the header");
  diag_cmd->add_option("--burn-in", dop.burn_in)->capture_default_str();
  diag_cmd->add_option("--dims", dop.dims)->delimiter(',')->capture_default_str();
  diag_cmd->add_option("--resolution", dop.resolution)->capture_default_str();
  diag_cmd->add_option("--out", dop.out, "Output prefix")->required();

  DrawOpts dr;
  auto* draw_cmd = app.add_subcommand("draw", "Exact draws from one mixture component");
  draw_cmd->add_option("--target", dr.target)->capture_default_str();
  draw_cmd->add_option("--component", dr.component, "0-based component index")
    ->capture_default_str();
  draw_cmd->add_option("--n", dr.n)->capture_default_str();
  draw_cmd->add_option("--seed", dr.seed)->capture_default_str();
  draw_cmd->add_option("--out", dr.out, "Point CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*run_cmd)
      cmd_run(ro, out);
    else if (*t1_cmd)
      cmd_table1(to, out);
    else if (*comb_cmd)
      cmd_combine(co, out, err);
    else if (*diag_cmd)
      cmd_diag(dop, out);
    else if (*draw_cmd)
      cmd_draw(dr);
  } catch (const InputError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

} // namespace ptwalk::cli
