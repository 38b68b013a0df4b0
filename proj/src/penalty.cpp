#include "ptwalk/penalty.hpp"

#include "ptwalk/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ptwalk {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

double
squared_mahalanobis(const PenaltyGeometry& geom, const Point& w)
{
  return ((w - geom.mu).array().square() / geom.sigma_diag.array()).sum();
}

double
log_rho_ratio(const PenaltyShape& shape, double q, int d)
{
  switch (shape.kind) {
    case PenaltyKind::flipped_gaussian:
      return -0.5 * q;
    case PenaltyKind::flipped_t:
      return -0.5 * (shape.df + d) * std::log1p(q / shape.df);
    case PenaltyKind::flipped_rational:
      return -std::log1p(q);
    case PenaltyKind::flipped_bump:
      return q < 1.0 ? 1.0 - 1.0 / (1.0 - q) : neg_inf;
  }
  return neg_inf;
}

//! log(1 - rho/rho0), accurate near the centre.
double
log_penalty(const PenaltyShape& shape, const PenaltyGeometry& geom, const Point& w)
{
  const double lr = log_rho_ratio(shape, squared_mahalanobis(geom, w),
                                  static_cast<int>(w.size()));
  if (lr == neg_inf)
    return 0.0;
  const double one_minus = -std::expm1(lr);
  return one_minus > 0.0 ? std::log(one_minus) : neg_inf;
}

double
clamped_exponent(const Eigen::VectorXd& grad, const Point& mu_t, const Point& w)
{
  if (!grad.allFinite())
    throw NumericError("gradient is not finite; gradient penalty unusable at "
                       "this state");
  return std::clamp(grad.dot(w - mu_t), -700.0, 700.0);
}

double
log_gradient_penalty(const Eigen::VectorXd& grad, const Point& mu_t, const Point& w)
{
  // log(1 / (1 + e^s)) = -softplus(s)
  const double s = clamped_exponent(grad, mu_t, w);
  return s > 0.0 ? -s - std::log1p(std::exp(-s)) : -std::log1p(std::exp(s));
}

Point
draw_standard(const ProposalFamily& family, int d, Rng& rng)
{
  Point z(d);
  for (int i = 0; i < d; ++i)
    z[i] = rng.normal();
  if (family.kind == ProposalKind::student_t)
    z /= std::sqrt(rng.chi_squared(family.df) / family.df);
  return z;
}

} // namespace

void
PenaltyConfig::validate() const
{
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    throw ConfigError("penalty kappa must be positive");
  if (shape.kind == PenaltyKind::flipped_t && !(shape.df > 0.0))
    throw ConfigError("flipped-t penalty df must be positive");
  if (proposal.kind == ProposalKind::student_t && !(proposal.df > 0.0))
    throw ConfigError("student-t proposal df must be positive");
  if (max_trials < 1)
    throw ConfigError("penalty max_trials must be positive");
}

PenaltyGeometry
center_scale(const Point& x, const Point& y)
{
  if (x.size() != y.size())
    throw InputError("center_scale: dimension mismatch");
  PenaltyGeometry g;
  g.mu = 0.5 * (x + y);
  g.sigma_diag = (x - y).array().square().max(scale_floor).matrix();
  return g;
}

double
penalty_rho_ratio(const PenaltyShape& shape, double q, int d)
{
  return std::exp(log_rho_ratio(shape, q, d));
}

double
penalty_eval(const PenaltyShape& shape, const PenaltyGeometry& geom, const Point& w)
{
  if (w.size() != geom.mu.size())
    throw InputError("penalty_eval: dimension mismatch");
  const double lr = log_rho_ratio(shape, squared_mahalanobis(geom, w),
                                  static_cast<int>(w.size()));
  return std::clamp(-std::expm1(lr), 0.0, 1.0);
}

double
gradient_penalty_eval(const Eigen::VectorXd& grad, const Point& mu_t, const Point& w)
{
  return 1.0 / (1.0 + std::exp(clamped_exponent(grad, mu_t, w)));
}

Point
draw_proposal(const ProposalFamily& family,
              const Point& mu,
              const Eigen::VectorXd& scale,
              Rng& rng)
{
  return mu + scale.cwiseProduct(
                draw_standard(family, static_cast<int>(mu.size()), rng));
}

double
proposal_log_density(const ProposalFamily& family,
                     const Point& mu,
                     const Eigen::VectorXd& scale,
                     const Point& w)
{
  const double d = static_cast<double>(mu.size());
  const double q = ((w - mu).array() / scale.array()).square().sum();
  const double log_det = scale.array().log().sum();
  if (family.kind == ProposalKind::gaussian)
    return -0.5 * d * std::log(2.0 * std::numbers::pi) - log_det - 0.5 * q;
  const double nu = family.df;
  return std::lgamma(0.5 * (nu + d)) - std::lgamma(0.5 * nu) -
         0.5 * d * std::log(nu * std::numbers::pi) - log_det -
         0.5 * (nu + d) * std::log1p(q / nu);
}

Point
sample_flip(const PenaltyGeometry& geom,
            const Eigen::VectorXd& grad,
            const ProposalFamily& family,
            Rng& rng)
{
  const Point w = draw_proposal(family, geom.mu, geom.scale(), rng);
  const double omega = rng.uniform();
  if (omega <= gradient_penalty_eval(grad, geom.mu, w))
    return w;
  return 2.0 * geom.mu - w;
}

RejectionDraw
sample_rejection(const PenaltyGeometry& geom, const PenaltyConfig& cfg, Rng& rng)
{
  const Eigen::VectorXd scale = cfg.kappa * geom.scale();
  for (int trial = 1; trial <= cfg.max_trials; ++trial) {
    Point w = draw_proposal(cfg.proposal, geom.mu, scale, rng);
    const double omega = rng.uniform();
    if (penalty_eval(cfg.shape, geom, w) >= omega)
      return { std::move(w), trial };
  }
  throw SamplerFailure("penalised rejection sampler exceeded " +
                         std::to_string(cfg.max_trials) + " trials",
                       cfg.max_trials);
}

double
normconst_closed(int d, double kappa)
{
  return 1.0 - std::pow(1.0 + kappa * kappa, -0.5 * d);
}

NormConstEstimate
normconst_mc(const PenaltyConfig& cfg, int d, long long n, Rng& rng)
{
  if (n < 1)
    throw InputError("normconst_mc: n must be at least 1");
  const double k2 = cfg.kappa * cfg.kappa;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (long long k = 0; k < n; ++k) {
    const double q = k2 * draw_standard(cfg.proposal, d, rng).squaredNorm();
    const double r = penalty_rho_ratio(cfg.shape, q, d);
    sum += r;
    sum_sq += r * r;
  }
  const double mean = sum / static_cast<double>(n);
  const double var =
    n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / static_cast<double>(n - 1))
          : 0.0;
  return { 1.0 - mean, std::sqrt(var / static_cast<double>(n)) };
}

std::pair<Point, Point>
propose_pair(const Point& x,
             const Point& y,
             const Point& w,
             const Point& mu,
             PairVariant variant)
{
  const Point shift = w - mu;
  if (variant == PairVariant::keep)
    return { x + shift, y + shift };
  return { y + shift, x + shift };
}

double
mh_ratio_penalised(const TargetDensity& target,
                   const PairState& current,
                   const PairState& proposed,
                   const Point& w,
                   const PenaltyConfig& cfg)
{
  const PenaltyGeometry fwd = center_scale(current.x, current.y);
  const PenaltyGeometry rev = center_scale(proposed.x, proposed.y);

  double log_fwd = 0.0;
  double log_rev = 0.0;
  if (cfg.variant == PenaltyVariant::rejection) {
    log_fwd = proposal_log_density(cfg.proposal, fwd.mu, cfg.kappa * fwd.scale(), w) +
              log_penalty(cfg.shape, fwd, w);
    log_rev =
      proposal_log_density(cfg.proposal, rev.mu, cfg.kappa * rev.scale(), fwd.mu) +
      log_penalty(cfg.shape, rev, fwd.mu);
  } else {
    // both densities are 2 g phi~; the factor 2 cancels
    log_fwd = proposal_log_density(cfg.proposal, fwd.mu, fwd.scale(), w) +
              log_gradient_penalty(target.grad_log_pi(fwd.mu), fwd.mu, w);
    log_rev = proposal_log_density(cfg.proposal, rev.mu, rev.scale(), fwd.mu) +
              log_gradient_penalty(target.grad_log_pi(rev.mu), rev.mu, fwd.mu);
  }
  if (log_fwd == neg_inf || std::isnan(log_fwd))
    return neg_inf;
  const double log_target = proposed.log_gamma_x + proposed.log_gamma_y -
                            current.log_gamma_x - current.log_gamma_y;
  const double r = log_target + log_rev - log_fwd;
  return std::isnan(r) ? neg_inf : r;
}

StepResult
penalised_move(const PairState& state,
               const TargetDensity& target,
               const PenaltyConfig& cfg,
               Rng& rng)
{
  StepResult out{ state, {} };
  out.record.kind = MoveKind::penalty;
  out.record.log_mh_ratio = neg_inf;

  const PenaltyGeometry geom = center_scale(state.x, state.y);
  Point w;
  try {
    if (cfg.variant == PenaltyVariant::rejection) {
      RejectionDraw draw = sample_rejection(geom, cfg, rng);
      out.record.rejection_trials = draw.trials;
      w = std::move(draw.w);
    } else {
      w = sample_flip(geom, target.grad_log_pi(geom.mu), cfg.proposal, rng);
    }
  } catch (const SamplerFailure& e) {
    out.record.rejection_trials = e.trials;
    out.record.sampler_failed = true;
    return out;
  } catch (const NumericError&) {
    out.record.sampler_failed = true;
    return out;
  }

  const PairVariant variant = rng.coin() ? PairVariant::keep : PairVariant::swap;
  auto [u, v] = propose_pair(state.x, state.y, w, geom.mu, variant);
  PairState proposed{ std::move(u), std::move(v), 0.0, 0.0 };
  proposed.log_gamma_x = target.log_density(proposed.x);
  proposed.log_gamma_y = target.log_density(proposed.y);

  const double omega = rng.uniform();
  double log_r = neg_inf;
  if (proposed.log_gamma_x > neg_inf && proposed.log_gamma_y > neg_inf) {
    try {
      log_r = mh_ratio_penalised(target, state, proposed, w, cfg);
    } catch (const NumericError&) {
      out.record.sampler_failed = true;
    }
  }
  out.record.log_mh_ratio = log_r;
  if (std::log(omega) <= log_r) {
    out.record.accepted = true;
    out.state = std::move(proposed);
  }
  return out;
}

} // namespace ptwalk
