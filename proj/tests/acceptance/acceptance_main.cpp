// Acceptance suite: one PASS/FAIL verdict line per criterion, informational
// lines indented below. Exit status is nonzero if any verdict is FAIL.

#include "stat_helpers.hpp"

#include "ptwalk/combine.hpp"
#include "ptwalk/diagnostics.hpp"
#include "ptwalk/penalty.hpp"
#include "ptwalk/twalk.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace ptwalk;

namespace {

constexpr std::uint64_t seed = 20240101;

struct Verdict
{
  bool pass = true;
  std::ostringstream info;
  std::string summary;

  void require(bool ok, const std::string& what)
  {
    if (!ok) {
      pass = false;
      info << "  failed: " << what << '\n';
    }
  }
};

using Clock = std::chrono::steady_clock;

double
seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string
fmt(double v, int prec = 4)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

Point
constant(int d, double v)
{
  return Point::Constant(d, v);
}

std::vector<double>
thinned(const std::vector<double>& xs, std::size_t every)
{
  std::vector<double> out;
  for (std::size_t i = 0; i < xs.size(); i += every)
    out.push_back(xs[i]);
  return out;
}

double
uniform01_cdf(double v)
{
  return std::clamp(v, 0.0, 1.0);
}

// ---------------------------------------------------------------------------

void
half_mass(Verdict& v)
{
  const auto t0 = Clock::now();
  Rng geo(seed, 1);
  const long long n = 1000000;
  double worst = 0.0;
  int count = 0;
  for (int k = 0; k < 20; ++k) {
    const int d = 1 + static_cast<int>(geo.index(6));
    PenaltyGeometry g{ Point(d), Eigen::VectorXd(d) };
    Eigen::VectorXd grad(d);
    for (int j = 0; j < d; ++j) {
      g.mu[j] = 5.0 * geo.normal();
      g.sigma_diag[j] = std::exp(2.0 * geo.normal());
      grad[j] = 2.0 * geo.normal() / std::sqrt(g.sigma_diag[j]);
    }
    for (auto fam : { ProposalFamily::gaussian(), ProposalFamily::student_t(1.0) }) {
      Rng rng(seed, 100 + count);
      double s = 0.0, s2 = 0.0;
      const Eigen::VectorXd scale = g.scale();
      for (long long i = 0; i < n; ++i) {
        const double p = gradient_penalty_eval(grad, g.mu, draw_proposal(fam, g.mu, scale, rng));
        s += p;
        s2 += p * p;
      }
      const double m = s / n;
      const double se = std::sqrt((s2 / n - m * m) / n);
      const double z = std::abs(m - 0.5) / se;
      worst = std::max(worst, z);
      v.require(z < 3.0, "geometry " + std::to_string(k) + " d=" + std::to_string(d) +
                           ": mean " + fmt(m, 7) + ", " + fmt(z, 3) + " s.e. from 1/2");
      ++count;
    }
  }
  const double secs = seconds_since(t0);
  v.require(secs < 30.0, "runtime " + fmt(secs, 3) + " s exceeds 30 s");
  v.summary = std::to_string(count) + " (geometry, proposal) cases, worst deviation " +
              fmt(worst, 3) + " s.e., " + fmt(secs, 3) + " s";
}

void
normconst_table(Verdict& v)
{
  const auto t0 = Clock::now();
  struct Cell
  {
    bool gaussian;
    int d;
    double kappa;
    double printed;   // NaN for bound-only cells
    double lower;     // bound for bound-only cells
  };
  const double nan = std::nan("");
  const std::vector<Cell> cells{
    { true, 2, 2, 0.8392, 0 },    { true, 2, 3, 0.9148, 0 },    { true, 2, 4, 0.94856, 0 },
    { true, 4, 2, 0.9516, 0 },    { true, 4, 3, 0.9832, 0 },    { true, 4, 4, 0.9925, 0 },
    { true, 8, 2, 0.9897, 0 },    { true, 8, 3, 0.9983, 0 },    { true, 8, 4, 0.9997, 0 },
    { true, 16, 2, 0.9991, 0 },   { true, 16, 3, 0.9999, 0 },   { true, 16, 4, nan, 1 - 1e-5 },
    { false, 2, 2, 0.8671, 0 },   { false, 2, 3, 0.9275, 0 },   { false, 2, 4, 0.9551, 0 },
    { false, 4, 2, 0.9802, 0 },   { false, 4, 3, 0.9931, 0 },   { false, 4, 4, 0.9970, 0 },
    { false, 8, 2, 0.9993, 0 },   { false, 8, 3, 0.9999, 0 },   { false, 8, 4, nan, 1 - 1e-5 },
    // printed as a merged ">1-1e-8" row; gated by the column tolerance,
    // strict bound reported alongside
    { false, 16, 2, 1.0, 1 - 1e-8 }, { false, 16, 3, 1.0, 1 - 1e-8 },
    { false, 16, 4, 1.0, 1 - 1e-8 },
  };
  int matched = 0;
  std::uint64_t k = 0;
  for (const auto& c : cells) {
    PenaltyConfig pc;
    pc.shape = c.gaussian ? PenaltyShape::gaussian() : PenaltyShape::student_t(2.0);
    pc.proposal = ProposalFamily::student_t(1.0);
    pc.kappa = c.kappa;
    Rng rng(seed, streams::table1_base + k++);
    const auto e = normconst_mc(pc, c.d, 1000000, rng);
    std::string label = std::string(c.gaussian ? "gaussian" : "t2") + " d=" +
                        std::to_string(c.d) + " kappa=" + fmt(c.kappa, 2);
    bool ok;
    std::string expect;
    if (std::isnan(c.printed)) {
      ok = e.z_hat >= c.lower;
      expect = ">= 1-1e-5";
    } else {
      const double tol = c.gaussian ? 0.005 : 0.01;
      ok = std::abs(e.z_hat - c.printed) <= tol;
      expect = fmt(c.printed, 6) + " +- " + fmt(tol, 2);
      if (c.lower > 0)
        expect += "; strict bound >1-1e-8 " +
                  std::string(e.z_hat > c.lower ? "met" : "not met");
    }
    v.info << "  " << label << ": z_hat " << fmt(e.z_hat, 10) << " (s.e. " << fmt(e.std_err, 2)
           << "), 1-z " << fmt(1.0 - e.z_hat, 3) << ", expected " << expect << '\n';
    v.require(ok, label);
    matched += ok;
  }
  const double secs = seconds_since(t0);
  v.require(secs < 300.0, "runtime " + fmt(secs, 3) + " s exceeds 5 min");
  v.summary = std::to_string(matched) + "/24 cells matched, " + fmt(secs, 3) + " s";
}

void
closed_form(Verdict& v)
{
  v.require(normconst_closed(2, 2.0) == 1.0 - 1.0 / 5.0, "d=2 kappa=2 closed form != 0.8");
  v.require(std::abs(normconst_closed(2, 2.0) - 0.8) < 1e-15, "d=2 kappa=2 closed form != 0.8");
  v.require(std::abs(normconst_closed(2, 3.0) - 0.9) < 1e-15, "d=2 kappa=3 closed form != 0.9");
  double worst = 0.0;
  std::uint64_t k = 0;
  for (int d : { 2, 4, 8, 16 })
    for (double kappa : { 2.0, 3.0, 4.0 }) {
      PenaltyConfig pc;
      pc.shape = PenaltyShape::gaussian();
      pc.proposal = ProposalFamily::gaussian();
      pc.kappa = kappa;
      Rng rng(seed, 2000 + k++);
      const auto e = normconst_mc(pc, d, 1000000, rng);
      const double exact = normconst_closed(d, kappa);
      const double z = std::abs(e.z_hat - exact) / e.std_err;
      worst = std::max(worst, z);
      v.require(z < 3.0, "d=" + std::to_string(d) + " kappa=" + fmt(kappa, 2) + ": " +
                           fmt(z, 3) + " s.e. from closed form");
    }
  v.summary = "12 cells, worst deviation " + fmt(worst, 3) + " s.e.; spot values 0.8 and 0.9 exact";
}

void
state_free_constant(Verdict& v)
{
  const int n = 100000;
  auto trials_at = [&](const PenaltyConfig& pc, double gap, std::uint64_t stream) {
    const Point x = constant(2, 1.0), y = constant(2, 1.0 + gap);
    const auto geom = center_scale(x, y);
    Rng rng(seed, stream);
    std::vector<int> t(n);
    for (auto& ti : t)
      ti = sample_rejection(geom, pc, rng).trials;
    return t;
  };

  PenaltyConfig gg;
  gg.shape = PenaltyShape::gaussian();
  gg.proposal = ProposalFamily::gaussian();
  gg.kappa = 3.0;
  const double z = normconst_closed(2, 3.0);
  const auto t = trials_at(gg, 1.0, 3000);
  std::vector<double> bins(4, 0.0);
  for (int ti : t)
    bins[std::min(ti, 4) - 1] += 1.0;
  const std::vector<double> probs{ z, z * (1 - z), z * (1 - z) * (1 - z),
                                   (1 - z) * (1 - z) * (1 - z) };
  const double p = stat::chi2_gof(bins, probs);
  v.info << "  trial counts {1,2,3,>=4}: " << bins[0] << ' ' << bins[1] << ' ' << bins[2] << ' '
         << bins[3] << ", chi2 p = " << fmt(p, 3) << '\n';
  v.require(p > 0.01, "trial counts do not fit Geom(0.9)");

  auto zhat = [&](const std::vector<int>& tr) {
    double s = 0.0;
    for (int ti : tr)
      s += ti;
    const double zz = n / s;
    return std::pair{ zz, std::sqrt(zz * zz * (1.0 - zz) / n) };
  };
  std::string detail;
  std::uint64_t stream = 3001;
  for (const auto& [name, pc] : { std::pair{ "gaussian/gaussian", gg },
                                  std::pair{ "default t2/t1", PenaltyConfig{} } }) {
    const auto [z1, s1] = zhat(trials_at(pc, 1e-3, stream++));
    const auto [z2, s2] = zhat(trials_at(pc, 1e3, stream++));
    const double dev = std::abs(z1 - z2) / std::hypot(s1, s2);
    v.info << "  " << name << ": z_hat " << fmt(z1, 6) << " at gap 1e-3, " << fmt(z2, 6)
           << " at gap 1e3, " << fmt(dev, 3) << " s.e. apart\n";
    v.require(dev < 3.0, std::string(name) + " z_hat differs across states");
    detail += std::string(detail.empty() ? "" : ", ") + name + " " + fmt(dev, 3) + " s.e.";
  }
  v.summary = "Geom fit p = " + fmt(p, 3) + "; state difference " + detail;
}

void
flip_exactness(Verdict& v)
{
  const int n = 100000;
  auto run_case = [&](const PenaltyGeometry& g, const Eigen::VectorXd& grad, const ProposalFamily& fam,
                      std::uint64_t stream, std::vector<Point>& flip, std::vector<Point>& oracle) {
    Rng rf(seed, stream), ro(seed, stream + 1);
    for (int i = 0; i < n; ++i)
      flip.push_back(sample_flip(g, grad, fam, rf));
    const Eigen::VectorXd scale = g.scale();
    while (static_cast<int>(oracle.size()) < n) {
      const Point w = draw_proposal(fam, g.mu, scale, ro);
      if (ro.uniform() <= gradient_penalty_eval(grad, g.mu, w))
        oracle.push_back(w);
    }
  };
  auto bin_of = [](double z, int nb, double lim) {
    const double c = std::clamp(z, -lim, lim - 1e-12);
    return static_cast<int>((c + lim) / (2 * lim) * nb);
  };

  // 1-d: g = N(0,1), gradient 2
  {
    std::vector<Point> f, o;
    const PenaltyGeometry g{ Point::Zero(1), Eigen::VectorXd::Ones(1) };
    run_case(g, Eigen::VectorXd::Constant(1, 2.0), ProposalFamily::gaussian(), 4000, f, o);
    std::vector<double> a(40), b(40), fa, ob;
    for (int i = 0; i < n; ++i) {
      a[bin_of(f[i][0], 40, 4.0)] += 1;
      b[bin_of(o[i][0], 40, 4.0)] += 1;
      fa.push_back(f[i][0]);
      ob.push_back(o[i][0]);
    }
    const double pc = stat::chi2_two_sample(a, b);
    const double pk = stat::ks_two_sample(fa, ob);
    v.info << "  1-d: chi2 p = " << fmt(pc, 3) << ", KS p = " << fmt(pk, 3) << '\n';
    v.require(pc > 0.01 && pk > 0.01, "1-d flip sampler differs from the oracle");
    v.summary = "1-d chi2 p " + fmt(pc, 3) + ", KS p " + fmt(pk, 3);
  }
  // 2-d: heavy-tailed g, anisotropic scale
  {
    std::vector<Point> f, o;
    PenaltyGeometry g{ Point(2), Eigen::VectorXd(2) };
    g.mu << 1.0, -1.0;
    g.sigma_diag << 1.0, 4.0;
    Eigen::VectorXd grad(2);
    grad << 0.8, -0.5;
    run_case(g, grad, ProposalFamily::student_t(1.0), 4100, f, o);
    const int nb = 12;
    std::vector<double> a(nb * nb), b(nb * nb), fa, ob;
    const Eigen::VectorXd s = g.scale();
    for (int i = 0; i < n; ++i) {
      auto cell = [&](const Point& w) {
        return bin_of((w[0] - g.mu[0]) / s[0], nb, 3.0) * nb + bin_of((w[1] - g.mu[1]) / s[1], nb, 3.0);
      };
      a[cell(f[i])] += 1;
      b[cell(o[i])] += 1;
      fa.push_back(grad.dot(f[i] - g.mu));
      ob.push_back(grad.dot(o[i] - g.mu));
    }
    const double pc = stat::chi2_two_sample(a, b);
    const double pk = stat::ks_two_sample(fa, ob);
    v.info << "  2-d: chi2 p = " << fmt(pc, 3) << ", KS (gradient projection) p = " << fmt(pk, 3)
           << '\n';
    v.require(pc > 0.01 && pk > 0.01, "2-d flip sampler differs from the oracle");
    v.summary += "; 2-d chi2 p " + fmt(pc, 3) + ", KS p " + fmt(pk, 3);
  }
}

void
kernel_invariance(Verdict& v)
{
  const auto t0 = Clock::now();
  const int d = 2;
  const auto box = make_uniform_box(d, 0.0, 1.0);
  double worst = 1.0;

  // Isolated kernels: independent chains started from the stationary pair
  // law; final x-states must be iid uniform. Traverse-only and penalty-only
  // chains are not ergodic on their own, so a single long chain cannot test
  // them.
  const char* names[] = { "walk", "traverse", "hop", "blow", "penalty" };
  const int chains = 100000, steps = 20;
  for (int kind = 0; kind < 5; ++kind) {
    KernelConfig cfg;
    if (kind < 4) {
      cfg.penalty_prob = 0.0;
      cfg.base_move_probs = { 0, 0, 0, 0 };
      cfg.base_move_probs[kind] = 1.0;
    } else {
      cfg.penalty_prob = 1.0;
    }
    Rng rng(seed, 5000 + kind);
    std::vector<std::vector<double>> xs(d);
    for (int m = 0; m < chains; ++m) {
      Point x(d), y(d);
      for (int j = 0; j < d; ++j) {
        x[j] = rng.uniform();
        y[j] = rng.uniform();
      }
      PairState s = init_chain(box, x, y, cfg);
      for (int k = 0; k < steps; ++k)
        s = step(s, box, cfg, rng).state;
      for (int j = 0; j < d; ++j)
        xs[j].push_back(s.x[j]);
    }
    v.info << "  " << names[kind] << " only (" << chains << " chains x " << steps << " steps): KS p";
    for (int j = 0; j < d; ++j) {
      const double p = stat::ks_one_sample(xs[j], uniform01_cdf);
      worst = std::min(worst, p);
      v.info << ' ' << fmt(p, 3);
      v.require(p > 0.01, std::string(names[kind]) + " coordinate " + std::to_string(j));
    }
    v.info << '\n';
  }

  // Mixed kernel: one chain, burn-in 1e4, 1e5 retained, thinned by 2 IAT so
  // the KS sample is close to independent.
  {
    KernelConfig cfg;
    cfg.seed = seed;
    Point x0(d), y0(d);
    x0 << 0.2, 0.3;
    y0 << 0.7, 0.6;
    const Trace tr = run(box, cfg, x0, y0, 110000);
    v.info << "  mixed kernel (single chain):";
    for (int j = 0; j < d; ++j) {
      const auto series = coordinate_series(tr, j, 10000);
      const double tau = iat(series).tau;
      const auto every = static_cast<std::size_t>(std::ceil(2.0 * tau));
      const auto sample = thinned(series, every);
      const double p = stat::ks_one_sample(sample, uniform01_cdf);
      worst = std::min(worst, p);
      v.info << " x" << j << " IAT " << fmt(tau, 3) << ", n " << sample.size() << ", KS p " << fmt(p, 3)
             << ';';
      v.require(p > 0.01, "mixed kernel coordinate " + std::to_string(j));
    }
    v.info << '\n';
  }

  // 1-d standard Gaussian moments with CLT bands from the measured IAT
  {
    const auto g = make_standard_gaussian(1);
    KernelConfig cfg;
    cfg.seed = seed + 1;
    const Trace tr = run(g, cfg, constant(1, 0.1), constant(1, -0.4), 110000);
    const auto series = coordinate_series(tr, 0, 10000);
    const double n = static_cast<double>(series.size());
    double m = 0.0, m2 = 0.0;
    for (double x : series) {
      m += x;
      m2 += x * x;
    }
    m /= n;
    const double var = m2 / n - m * m;
    const double tau = iat(series).tau;
    const double band = 3.0 * std::sqrt(var * tau / n);
    v.info << "  1-d gaussian: mean " << fmt(m, 3) << " (band " << fmt(band, 3) << "), variance "
           << fmt(var, 4) << ", IAT " << fmt(tau, 3) << '\n';
    v.require(std::abs(m) < band, "gaussian mean outside the CLT band");
    v.require(var >= 0.9 && var <= 1.1, "gaussian variance outside [0.9, 1.1]");
  }
  v.summary = "smallest KS p " + fmt(worst, 3) + ", " + fmt(seconds_since(t0), 3) + " s";
}

struct ChainStats
{
  double acceptance;
  double penalty_acceptance;
  std::vector<double> occupancy;
  std::size_t switches;
  double iat0;
  double secs;
};

ChainStats
chain_stats(const TargetDensity& t,
            const KernelConfig& cfg,
            const Point& x0,
            const Point& y0,
            std::size_t iters)
{
  const auto t0 = Clock::now();
  const Trace tr = run(t, cfg, x0, y0, iters);
  const double secs = seconds_since(t0);
  const auto xs = retained_x(tr);
  const auto labels = classify_nearest(xs, t.mode_centres());
  const auto idx = static_cast<std::size_t>(MoveKind::penalty);
  std::vector<double> c0;
  c0.reserve(xs.size());
  for (const auto& x : xs)
    c0.push_back(x[0]);
  return { static_cast<double>(tr.tally.total_accepted()) / iters,
           tr.tally.proposed[idx] ? static_cast<double>(tr.tally.accepted[idx]) / tr.tally.proposed[idx]
                                  : 0.0,
           mode_occupancy(xs, t.mode_centres()),
           count_switches(labels),
           iat(c0).tau,
           secs };
}

std::string
occ_string(const std::vector<double>& occ)
{
  std::string s;
  for (double f : occ)
    s += (s.empty() ? "" : " ") + fmt(f, 3);
  return s;
}

void
two_mode_behaviour(Verdict& v)
{
  const auto t = make_builtin("example1");
  const Point x0 = constant(2, 0.0), y0 = constant(2, 1.0);
  double occ = 0.0, acc_pen = 0.0, acc_plain = 0.0, slowest = 0.0;
  const int seeds = 5;
  for (int s = 0; s < seeds; ++s) {
    KernelConfig pen;
    pen.seed = seed + s;
    const auto a = chain_stats(t, pen, x0, y0, 500000);
    KernelConfig plain = pen;
    plain.penalty_prob = 0.0;
    const auto b = chain_stats(t, plain, x0, y0, 500000);
    v.info << "  seed " << pen.seed << ": penalised occupancy " << occ_string(a.occupancy)
           << ", acceptance " << fmt(a.acceptance, 3) << " (penalty move " << fmt(a.penalty_acceptance, 3)
           << "), IAT " << fmt(a.iat0, 4) << "; plain acceptance " << fmt(b.acceptance, 3)
           << ", switches " << b.switches << ", IAT " << fmt(b.iat0, 4) << '\n';
    v.require(a.occupancy[0] > 0.0 && a.occupancy[1] > 0.0,
              "penalised seed " + std::to_string(pen.seed) + " missed a mode");
    v.require(b.switches <= 2, "plain seed " + std::to_string(pen.seed) + " switched basins " +
                                 std::to_string(b.switches) + " times");
    occ += a.occupancy[1] / seeds;
    acc_pen += a.acceptance / seeds;
    acc_plain += b.acceptance / seeds;
    slowest = std::max({ slowest, a.secs, b.secs });
  }
  v.require(occ >= 0.35 && occ <= 0.65, "mean second-mode occupancy " + fmt(occ, 3) + " outside [0.35, 0.65]");
  v.require(std::abs(acc_pen - 0.16) <= 0.05, "penalised acceptance " + fmt(acc_pen, 3) + " not within 0.16 +- 0.05");
  v.require(std::abs(acc_plain - 0.33) <= 0.05, "plain acceptance " + fmt(acc_plain, 3) + " not within 0.33 +- 0.05");
  v.require(slowest < 120.0, "a run took " + fmt(slowest, 3) + " s");
  v.summary = "mean occupancy " + fmt(occ, 3) + ", acceptance " + fmt(acc_pen, 3) + " penalised / " +
              fmt(acc_plain, 3) + " plain, slowest run " + fmt(slowest, 3) + " s";
}

void
cube_modes(Verdict& v)
{
  const auto t = make_builtin("cube9");
  const Point x0 = t.mode_centres().front();
  const Point y0 = x0.array() + 1.0;
  KernelConfig pen;
  pen.seed = seed;
  const auto a = chain_stats(t, pen, x0, y0, 1000000);
  KernelConfig plain = pen;
  plain.penalty_prob = 0.0;
  const auto b = chain_stats(t, plain, x0, y0, 1000000);
  int visited_pen = 0, visited_plain = 0;
  for (double f : a.occupancy)
    visited_pen += f > 0.0;
  for (double f : b.occupancy)
    visited_plain += f > 0.0;
  v.info << "  penalised occupancy " << occ_string(a.occupancy) << ", acceptance " << fmt(a.acceptance, 3)
         << "\n  plain occupancy " << occ_string(b.occupancy) << ", acceptance " << fmt(b.acceptance, 3) << '\n';
  v.require(visited_pen == 9, "penalised run visited " + std::to_string(visited_pen) + " modes");
  v.require(visited_plain <= 2, "plain run visited " + std::to_string(visited_plain) + " modes");
  v.require(std::abs(a.acceptance - 0.04) <= 0.03,
            "penalised acceptance " + fmt(a.acceptance, 3) + " not within 0.04 +- 0.03");
  v.summary = "penalised visits " + std::to_string(visited_pen) + "/9, plain " + std::to_string(visited_plain) +
              ", penalised acceptance " + fmt(a.acceptance, 3);
}

void
banana_modes(Verdict& v)
{
  const auto t = make_builtin("banana10");
  const Point x0 = t.mode_centres()[1];
  const Point y0 = x0.array() + 1.0;
  KernelConfig pen;
  pen.seed = seed;
  const auto a = chain_stats(t, pen, x0, y0, 1000000);
  KernelConfig plain = pen;
  plain.penalty_prob = 0.0;
  const auto b = chain_stats(t, plain, x0, y0, 1000000);
  auto all = [](const std::vector<double>& o) {
    return std::all_of(o.begin(), o.end(), [](double f) { return f > 0.0; });
  };
  v.info << "  penalised occupancy " << occ_string(a.occupancy) << ", acceptance " << fmt(a.acceptance, 3)
         << ", penalty move " << fmt(a.penalty_acceptance, 3) << ", IAT " << fmt(a.iat0, 4) << '\n'
         << "  plain occupancy " << occ_string(b.occupancy) << ", acceptance " << fmt(b.acceptance, 3)
         << ", IAT " << fmt(b.iat0, 4) << '\n';
  v.require(all(a.occupancy), "penalised run missed a component");
  v.require(all(b.occupancy), "plain run missed a component");
  v.require(a.penalty_acceptance >= 0.0005 && a.penalty_acceptance <= 0.02,
            "penalty move acceptance " + fmt(a.penalty_acceptance, 3) + " outside [0.0005, 0.02]");
  v.require(std::abs(b.acceptance - 0.13) <= 0.05, "plain acceptance " + fmt(b.acceptance, 3) + " not within 0.13 +- 0.05");
  v.require(std::abs(a.acceptance - 0.10) <= 0.05,
            "penalised acceptance " + fmt(a.acceptance, 3) + " not within 0.10 +- 0.05");
  v.summary = "penalty move acceptance " + fmt(a.penalty_acceptance, 3) + ", global " + fmt(b.acceptance, 3) +
              " plain / " + fmt(a.acceptance, 3) + " penalised";
}

struct WeightedSamples
{
  Eigen::MatrixXd p1, p2;
};

const WeightedSamples&
weighted_samples()
{
  static const WeightedSamples s = [] {
    const auto spec = builtin_spec("example1_weighted");
    Rng rng(seed, streams::draw);
    WeightedSamples w;
    w.p1 = draw_component(spec, 0, 10000, rng);
    w.p2 = draw_component(spec, 1, 10000, rng);
    return w;
  }();
  return s;
}

TargetDensity
scaled(const TargetDensity& t, double c)
{
  const double lc = std::log(c);
  return TargetDensity(t.name(), t.dim(), [t, lc](const Point& x) { return t.log_density(x) + lc; });
}

void
ratio_unbiasedness(Verdict& v)
{
  const auto target = make_builtin("example1_weighted");
  const auto& w = weighted_samples();
  const LooKdeConfig cfg;
  const double m1 = ratio_vector(make_region_sample(w.p1, 1, target), cfg).mean();
  const double m2 = ratio_vector(make_region_sample(w.p2, 2, target), cfg).mean();
  v.require(std::abs(m1 / 10.0 - 1.0) <= 0.05, "region 1 mean ratio " + fmt(m1, 5));
  v.require(std::abs(m2 / (10.0 / 9.0) - 1.0) <= 0.05, "region 2 mean ratio " + fmt(m2, 5));
  v.summary = "mean ratios " + fmt(m1, 5) + " (target 10) and " + fmt(m2, 5) + " (target 1.111)";
}

std::vector<IndexChainState>
weighted_combine(double c, CombineResult* out = nullptr)
{
  const auto target = scaled(make_builtin("example1_weighted"), c);
  const auto& w = weighted_samples();
  Rng rng(seed, streams::combine);
  CombineResult r = combine_run(make_region_sample(w.p1, 1, target), make_region_sample(w.p2, 2, target),
                                LooKdeConfig{}, 100000, rng);
  if (out)
    *out = r;
  return r.trace;
}

void
jumping_modes(Verdict& v)
{
  const auto t0 = Clock::now();
  CombineResult r;
  weighted_combine(1.0, &r);
  const double secs = seconds_since(t0);

  const auto target = make_builtin("example1_weighted");
  const auto& w = weighted_samples();
  Rng rng(seed, streams::resample);
  const auto oracle = resample_oracle(make_region_sample(w.p1, 1, target), make_region_sample(w.p2, 2, target),
                                      0.1, 0.9, 100000, rng);
  double o1 = 0.0;
  for (const auto& s : oracle)
    o1 += s.region == 1;
  o1 /= static_cast<double>(oracle.size());

  v.info << "  chain occupancy " << fmt(r.occupancy[0], 4) << " / " << fmt(r.occupancy[1], 4) << ", acceptance "
         << fmt(r.acceptance, 3) << ", oracle occupancy " << fmt(o1, 4) << " / " << fmt(1 - o1, 4)
         << (r.overlap_warning ? ", overlap warning" : "") << '\n';
  v.require(std::abs(r.occupancy[0] - 0.1) <= 0.02 && std::abs(r.occupancy[1] - 0.9) <= 0.02,
            "occupancy outside 0.1/0.9 +- 0.02");
  v.require(std::abs(r.acceptance - 0.20) <= 0.05, "acceptance " + fmt(r.acceptance, 3) + " not within 0.20 +- 0.05");
  v.require(std::abs(r.occupancy[0] - o1) <= 0.02, "chain and oracle occupancy differ by more than 0.02");
  v.require(secs < 60.0, "runtime " + fmt(secs, 3) + " s exceeds 1 min");
  v.summary = "occupancy " + fmt(r.occupancy[0], 4) + "/" + fmt(r.occupancy[1], 4) + ", acceptance " +
              fmt(r.acceptance, 3) + ", oracle " + fmt(o1, 4) + ", " + fmt(secs, 3) + " s";
}

void
scale_invariance(Verdict& v)
{
  const auto base = weighted_combine(1.0);
  std::string detail;
  for (double c : { 1e-6, 1e6 }) {
    const auto other = weighted_combine(c);
    std::size_t diff = other.size() == base.size() ? 0 : std::max(other.size(), base.size());
    for (std::size_t i = 0; i < std::min(other.size(), base.size()); ++i)
      diff += other[i].region != base[i].region || other[i].index != base[i].index;
    v.require(diff == 0, "c=" + fmt(c, 2) + ": " + std::to_string(diff) + " differing states");
    detail += (detail.empty() ? "" : ", ") + std::string("c=") + fmt(c, 2) + " " + std::to_string(diff) + " diffs";
  }
  v.summary = std::to_string(base.size()) + " states compared; " + detail;
}

} // namespace

int
main()
{
  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria{
    { "C01 flip-penalty half-mass identity", half_mass },
    { "C02 normalising-constant table", normconst_table },
    { "C03 gaussian/gaussian closed form", closed_form },
    { "C04 geometric trial counts, state-free constant", state_free_constant },
    { "C05 flip sampler exactness", flip_exactness },
    { "C06 kernel invariance", kernel_invariance },
    { "C07 two-mode 2-d mixture behaviour", two_mode_behaviour },
    { "C08 nine-mode cube mixture", cube_modes },
    { "C09 banana mixture in 10-d", banana_modes },
    { "C10 leave-one-out ratio unbiasedness", ratio_unbiasedness },
    { "C11 jumping-modes combination", jumping_modes },
    { "C12 combiner scale invariance", scale_invariance },
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Verdict v;
    try {
      fn(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.info << "  exception: " << e.what() << '\n';
    }
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.summary << '\n'
              << v.info.str() << std::flush;
    failed += !v.pass;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed ? 1 : 0;
}
