#pragma once

#include "ptwalk/chain_types.hpp"
#include "ptwalk/rng.hpp"
#include "ptwalk/targets.hpp"

#include <stdexcept>
#include <utility>

namespace ptwalk {

//! Floor applied to the diagonal scale entries (x_i - y_i)^2.
inline constexpr double scale_floor = 1e-12;

enum class PenaltyKind
{
  flipped_gaussian, //!< 1 - exp(-q/2)
  flipped_t,        //!< 1 - (1 + q/nu)^{-(nu+d)/2}
  flipped_rational, //!< 1 - 1/(1 + q)
  flipped_bump      //!< 1 - exp(1 - 1/(1-q)) on q < 1, else 1
};

struct PenaltyShape
{
  PenaltyKind kind = PenaltyKind::flipped_t;
  double df = 2.0; //!< flipped_t only

  static PenaltyShape gaussian() { return { PenaltyKind::flipped_gaussian, 0.0 }; }
  static PenaltyShape student_t(double df) { return { PenaltyKind::flipped_t, df }; }
  static PenaltyShape rational() { return { PenaltyKind::flipped_rational, 0.0 }; }
  static PenaltyShape bump() { return { PenaltyKind::flipped_bump, 0.0 }; }
};

enum class ProposalKind
{
  gaussian,
  student_t
};

//! Symmetric location-scale proposal g.
struct ProposalFamily
{
  ProposalKind kind = ProposalKind::student_t;
  double df = 1.0; //!< student_t only

  static ProposalFamily gaussian() { return { ProposalKind::gaussian, 0.0 }; }
  static ProposalFamily student_t(double df) { return { ProposalKind::student_t, df }; }
};

enum class PenaltyVariant
{
  gradient,  //!< logistic gradient penalty, flip sampler
  rejection  //!< location-scale penalty, rejection sampler
};

struct PenaltyConfig
{
  PenaltyShape shape{};
  ProposalFamily proposal{};
  double kappa = 3.0;
  PenaltyVariant variant = PenaltyVariant::rejection;
  int max_trials = 10000;

  //! Throws ConfigError.
  void validate() const;
};

//! Centre mu_xy and diagonal scale Sigma_xy of a pair.
struct PenaltyGeometry
{
  Point mu;
  Eigen::VectorXd sigma_diag;

  Eigen::VectorXd scale() const { return sigma_diag.cwiseSqrt(); }
};

PenaltyGeometry
center_scale(const Point& x, const Point& y);

//! rho(z) / rho(0) for the shape as a function of q = |z|^2 in dimension d.
double
penalty_rho_ratio(const PenaltyShape& shape, double q, int d);

//! 1 - rho0^{-1} rho(Sigma^{-1/2}(w - mu)); always in [0, 1].
double
penalty_eval(const PenaltyShape& shape, const PenaltyGeometry& geom, const Point& w);

//! 1 / (1 + exp(grad . (w - mu_t))), exponent clamped to +-700.
//! Throws NumericError if grad is not finite.
double
gradient_penalty_eval(const Eigen::VectorXd& grad, const Point& mu_t, const Point& w);

//! Draw from g with location mu and per-coordinate scale.
Point
draw_proposal(const ProposalFamily& family,
              const Point& mu,
              const Eigen::VectorXd& scale,
              Rng& rng);

double
proposal_log_density(const ProposalFamily& family,
                     const Point& mu,
                     const Eigen::VectorXd& scale,
                     const Point& w);

//! Flip sampler: W ~ g(mu, Sigma^{1/2}); keep W with probability
//! phi~(W), otherwise reflect to 2 mu - W. Output density is 2 g phi~.
Point
sample_flip(const PenaltyGeometry& geom,
            const Eigen::VectorXd& grad,
            const ProposalFamily& family,
            Rng& rng);

struct RejectionDraw
{
  Point w;
  int trials = 0;
};

//! Thrown by sample_rejection when max_trials is exhausted.
class SamplerFailure : public std::runtime_error
{
public:
  SamplerFailure(const std::string& what, int trials)
    : std::runtime_error(what)
    , trials(trials)
  {
  }
  int trials;
};

//! Rejection sampler for g phi / z with g located at mu and scaled by
//! kappa Sigma^{1/2}.
RejectionDraw
sample_rejection(const PenaltyGeometry& geom, const PenaltyConfig& cfg, Rng& rng);

//! 1 - (1 + kappa^2)^{-d/2}; exact for Gaussian penalty with Gaussian g.
double
normconst_closed(int d, double kappa);

struct NormConstEstimate
{
  double z_hat;
  double std_err;
};

//! Monte Carlo estimate of z = 1 - E[rho(kappa W)/rho0], W ~ standard g.
NormConstEstimate
normconst_mc(const PenaltyConfig& cfg, int d, long long n, Rng& rng);

enum class PairVariant
{
  keep, //!< u = x + (w - mu), v = y + (w - mu)
  swap  //!< u = y + (w - mu), v = x + (w - mu)
};

std::pair<Point, Point>
propose_pair(const Point& x,
             const Point& y,
             const Point& w,
             const Point& mu,
             PairVariant variant);

//! log of the penalised-move MH ratio for (x, y) -> (u, v) produced by the
//! draw w. Uses the cached log gamma values on both states. The reverse draw
//! is mu_xy, since mu_uv = w. Returns -inf (forced rejection) when the forward
//! proposal density vanishes.
double
mh_ratio_penalised(const TargetDensity& target,
                   const PairState& current,
                   const PairState& proposed,
                   const Point& w,
                   const PenaltyConfig& cfg);

//! One penalised move: draw w, pick keep/swap by a fair coin, accept by MH.
StepResult
penalised_move(const PairState& state,
               const TargetDensity& target,
               const PenaltyConfig& cfg,
               Rng& rng);

} // namespace ptwalk
