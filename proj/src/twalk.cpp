#include "ptwalk/twalk.hpp"

#include "ptwalk/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ptwalk {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

std::size_t
kind_index(MoveKind k)
{
  return static_cast<std::size_t>(k);
}

//! Walk factor: inverse CDF of the density proportional to 1/sqrt(1 + z) on
//! [-a/(1+a), a].
double
draw_walk_factor(double a, Rng& rng)
{
  const double u = rng.uniform();
  return (a / (1.0 + a)) * (a * u * u + 2.0 * u - 1.0);
}

//! Traverse factor: u^(1/(a+1)) with probability (a-1)/(2a), else
//! u^(1/(1-a)).
double
draw_traverse_factor(double a, Rng& rng)
{
  if (rng.uniform() < (a - 1.0) / (2.0 * a))
    return std::pow(rng.uniform(), 1.0 / (a + 1.0));
  return std::pow(rng.uniform(), 1.0 / (1.0 - a));
}

//! Coordinates to move this step. A uniform is drawn for every coordinate;
//! colliding coordinates (x_i == y_i) are never selected.
std::vector<int>
draw_subset(const Point& moving, const Point& pivot, int n1, Rng& rng)
{
  const int d = static_cast<int>(moving.size());
  const double p = static_cast<double>(std::min(d, n1)) / d;
  std::vector<int> subset;
  for (int i = 0; i < d; ++i) {
    const bool pick = rng.uniform() < p;
    if (pick && moving[i] != pivot[i])
      subset.push_back(i);
  }
  return subset;
}

double
max_gap(const Point& a, const Point& b, const std::vector<int>& subset)
{
  double m = 0.0;
  for (int i : subset)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double
subset_sq_dist(const Point& a, const Point& b, const std::vector<int>& subset)
{
  double s = 0.0;
  for (int i : subset)
    s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

//! log N(h_S | centre_S, sigma^2 I) up to the shared 2 pi term.
double
log_iso_gauss(double sq_dist, double sigma, std::size_t k)
{
  return -static_cast<double>(k) * std::log(sigma) - 0.5 * sq_dist / (sigma * sigma);
}

} // namespace

std::string_view
to_string(MoveKind kind)
{
  switch (kind) {
    case MoveKind::walk:
      return "walk";
    case MoveKind::traverse:
      return "traverse";
    case MoveKind::hop:
      return "hop";
    case MoveKind::blow:
      return "blow";
    case MoveKind::penalty:
      return "penalty";
  }
  return "unknown";
}

MoveKind
move_kind_from_string(std::string_view name)
{
  for (MoveKind k : all_move_kinds)
    if (to_string(k) == name)
      return k;
  throw InputError("unknown move kind '" + std::string(name) + "'");
}

void
KernelConfig::validate() const
{
  double total = 0.0;
  for (double p : base_move_probs) {
    if (!(p >= 0.0))
      throw ConfigError("base move probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw ConfigError("base move probabilities must sum to 1");
  if (!(penalty_prob >= 0.0 && penalty_prob <= 1.0))
    throw ConfigError("penalty probability must lie in [0, 1]");
  if (!(walk_param > 0.0))
    throw ConfigError("walk parameter must be positive");
  if (!(traverse_param > 1.0))
    throw ConfigError("traverse parameter must exceed 1");
  if (coord_update_target < 1)
    throw ConfigError("coordinate update target n1 must be positive");
  penalty.validate();
}

void
MoveTally::add(const MoveRecord& r)
{
  ++proposed[kind_index(r.kind)];
  if (r.accepted)
    ++accepted[kind_index(r.kind)];
}

std::size_t
MoveTally::total_proposed() const
{
  std::size_t s = 0;
  for (auto v : proposed)
    s += v;
  return s;
}

std::size_t
MoveTally::total_accepted() const
{
  std::size_t s = 0;
  for (auto v : accepted)
    s += v;
  return s;
}

PairState
init_chain(const TargetDensity& target,
           const Point& x0,
           const Point& y0,
           const KernelConfig& cfg)
{
  cfg.validate();
  if (x0.size() != target.dim() || y0.size() != target.dim())
    throw InitError("initial points must have dimension " +
                    std::to_string(target.dim()));
  for (int i = 0; i < x0.size(); ++i)
    if (x0[i] == y0[i])
      throw InitError("initial points coincide in coordinate " +
                      std::to_string(i) + "; jitter one of them");
  PairState s{ x0, y0, target.log_density(x0), target.log_density(y0) };
  if (!std::isfinite(s.log_gamma_x))
    throw InitError("log density is not finite at x0");
  if (!std::isfinite(s.log_gamma_y))
    throw InitError("log density is not finite at y0");
  return s;
}
Point
walk_proposal(const Point& m,
              const Point& p,
              const std::vector<int>& subset,
              const std::vector<double>& factors)
{
  Point h = m;
  for (std::size_t j = 0; j < subset.size(); ++j) {
    const int i = subset[j];
    h[i] = m[i] + (m[i] - p[i]) * factors[j];
  }
  return h;
}

Point
traverse_proposal(const Point& m, const Point& p, const std::vector<int>& subset, double beta)
{
  Point h = m;
  for (int i : subset)
    h[i] = p[i] + beta * (p[i] - m[i]);
  return h;
}

StepResult
base_move(const PairState& state,
          MoveKind kind,
          const TargetDensity& target,
          const KernelConfig& cfg,
          Rng& rng)
{
  if (kind == MoveKind::penalty)
    throw InputError("base_move: penalty is not a base move");

  const bool move_x = rng.coin();
  const Point& m = move_x ? state.x : state.y;
  const Point& p = move_x ? state.y : state.x;
  const double log_gamma_m = move_x ? state.log_gamma_x : state.log_gamma_y;

  StepResult out{ state, {} };
  out.record.kind = kind;

  const std::vector<int> subset =
    draw_subset(m, p, cfg.coord_update_target, rng);
  const auto k = subset.size();

  Point h = m;
  double log_hastings = 0.0;
  switch (kind) {
    case MoveKind::walk: {
      std::vector<double> z(k);
      for (auto& zi : z)
        zi = draw_walk_factor(cfg.walk_param, rng);
      h = walk_proposal(m, p, subset, z);
      break;
    }
    case MoveKind::traverse: {
      const double beta = draw_traverse_factor(cfg.traverse_param, rng);
      h = traverse_proposal(m, p, subset, beta);
      if (k > 0)
        log_hastings = (static_cast<double>(k) - 2.0) * std::log(beta);
      break;
    }
    case MoveKind::blow: {
      const double sigma = max_gap(p, m, subset);
      for (int i : subset)
        h[i] = p[i] + sigma * rng.normal();
      if (k > 0) {
        const double sigma_rev = max_gap(p, h, subset);
        log_hastings = log_iso_gauss(subset_sq_dist(m, p, subset), sigma_rev, k) -
                       log_iso_gauss(subset_sq_dist(h, p, subset), sigma, k);
      }
      break;
    }
    case MoveKind::hop: {
      const double sigma = max_gap(p, m, subset) / 3.0;
      for (int i : subset)
        h[i] = m[i] + sigma * rng.normal();
      if (k > 0) {
        const double sigma_rev = max_gap(p, h, subset) / 3.0;
        const double sq = subset_sq_dist(h, m, subset);
        log_hastings =
          log_iso_gauss(sq, sigma_rev, k) - log_iso_gauss(sq, sigma, k);
      }
      break;
    }
    case MoveKind::penalty:
      break;
  }

  const double omega = rng.uniform();
  if (k == 0) {
    // nothing selected: identity proposal
    out.record.accepted = true;
    out.record.log_mh_ratio = 0.0;
    return out;
  }

  double log_gamma_h = neg_inf;
  bool collides = false;
  for (int i : subset)
    collides = collides || h[i] == p[i];
  if (!collides && h.allFinite())
    log_gamma_h = target.log_density(h);

  const double log_r = log_gamma_h == neg_inf
                         ? neg_inf
                         : log_gamma_h - log_gamma_m + log_hastings;
  out.record.log_mh_ratio = log_r;
  if (std::log(omega) <= log_r) {
    out.record.accepted = true;
    if (move_x) {
      out.state.x = std::move(h);
      out.state.log_gamma_x = log_gamma_h;
    } else {
      out.state.y = std::move(h);
      out.state.log_gamma_y = log_gamma_h;
    }
  }
  return out;
}

StepResult
step(const PairState& state,
     const TargetDensity& target,
     const KernelConfig& cfg,
     Rng& rng)
{
  if (cfg.penalty_prob > 0.0 && rng.uniform() < cfg.penalty_prob)
    return penalised_move(state, target, cfg.penalty, rng);

  const double u = rng.uniform();
  double acc = 0.0;
  MoveKind kind = MoveKind::walk;
  for (std::size_t j = 0; j < cfg.base_move_probs.size(); ++j) {
    if (cfg.base_move_probs[j] <= 0.0)
      continue;
    kind = static_cast<MoveKind>(j);
    acc += cfg.base_move_probs[j];
    if (u < acc)
      break;
  }
  return base_move(state, kind, target, cfg, rng);
}

Trace
run(const TargetDensity& target,
    const KernelConfig& cfg,
    const Point& x0,
    const Point& y0,
    std::size_t iters,
    std::size_t thin,
    Rng& rng)
{
  if (iters < 1)
    throw InputError("run: iters must be at least 1");
  if (thin < 1)
    throw InputError("run: thin must be at least 1");

  Trace trace;
  trace.config = cfg;
  trace.thin = thin;
  trace.target_name = target.name();
  trace.records.reserve(iters);
  trace.states.reserve(iters / thin + 1);
  trace.state_iters.reserve(iters / thin + 1);

  PairState state = init_chain(target, x0, y0, cfg);
  trace.states.push_back(state);
  trace.state_iters.push_back(0);
  for (std::size_t t = 1; t <= iters; ++t) {
    StepResult r = step(state, target, cfg, rng);
    r.record.iter = t;
    trace.tally.add(r.record);
    trace.records.push_back(r.record);
    state = std::move(r.state);
    if (t % thin == 0) {
      trace.states.push_back(state);
      trace.state_iters.push_back(t);
    }
  }
  return trace;
}

Trace
run(const TargetDensity& target,
    const KernelConfig& cfg,
    const Point& x0,
    const Point& y0,
    std::size_t iters,
    std::size_t thin)
{
  Rng rng(cfg.seed, streams::chain);
  return run(target, cfg, x0, y0, iters, thin, rng);
}

} // namespace ptwalk
