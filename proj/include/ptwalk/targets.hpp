#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ptwalk {

class Rng;

using Point = Eigen::VectorXd;

//! Unnormalised log-density over R^d, with an optional gradient.
//!
//! Immutable after construction; evaluation is pure, so a single instance can
//! be shared by any number of chains.
class TargetDensity
{
public:
  using LogFn = std::function<double(const Point&)>;
  using GradFn = std::function<Point(const Point&)>;

  TargetDensity(std::string name,
                int dim,
                LogFn log_gamma,
                GradFn grad_log_pi = {},
                std::vector<Point> mode_centres = {});

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  bool has_gradient() const { return static_cast<bool>(grad_); }

  //! log gamma(x); -inf outside the support, never NaN.
  //! Throws InputError on dimension mismatch.
  double log_density(const Point& x) const;

  //! Gradient of log pi at x. Throws ConfigError if no gradient was supplied.
  Point grad_log_pi(const Point& x) const;

  //! Declared mode centres, used for occupancy classification.
  const std::vector<Point>& mode_centres() const { return centres_; }

private:
  std::string name_;
  int dim_;
  LogFn log_gamma_;
  GradFn grad_;
  std::vector<Point> centres_;
};

struct GaussianMixtureSpec
{
  std::vector<double> weights;
  std::vector<Point> means;
  std::vector<Eigen::MatrixXd> covariances;
  //! One curvature per component when present; see banana_map.
  std::optional<std::vector<double>> banana_b;

  int dim() const;
  //! Throws ConfigError naming the offending field.
  void validate() const;
};

//! (x1 + b x1^2 - 100 b, x2, ..., xd).
Point
banana_map(const Point& x, double b);

//! Mixture target  sum_i w_i N(phi_{b_i}(x) | mu_i, Sigma_i)  evaluated by
//! log-sum-exp, with an analytic gradient.
TargetDensity
make_mixture_target(const GaussianMixtureSpec& spec, std::string name);

//! One of: example1, example1_weighted, cube9, banana10.
TargetDensity
make_builtin(const std::string& name);

std::vector<std::string>
builtin_names();

GaussianMixtureSpec
builtin_spec(const std::string& name);

//! Mixture spec file (JSON):
//!   { "dim": 2,
//!     "components": [ { "weight": 0.5, "mean": [0, 0],
//!                       "cov": [[1, 0.1], [0.1, 1]], "banana_b": 0.0 }, ... ] }
//! `banana_b` is optional; a missing entry counts as 0.
GaussianMixtureSpec
parse_target_spec(const std::string& json_text);

TargetDensity
load_target_spec(const std::filesystem::path& path);

//! Builtin name or path to a mixture spec file.
TargetDensity
resolve_target(const std::string& name_or_path);

//! Uniform density on the box [lo, hi]^d (log gamma = 0 inside).
TargetDensity
make_uniform_box(int dim, double lo, double hi);

TargetDensity
make_standard_gaussian(int dim);

//! n exact draws (rows) from mixture component k. Curved components have no
//! closed-form sampler and are rejected with ConfigError.
Eigen::MatrixXd
draw_component(const GaussianMixtureSpec& spec, std::size_t k, std::size_t n, Rng& rng);

} // namespace ptwalk
