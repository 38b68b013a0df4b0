#pragma once

#include "ptwalk/rng.hpp"
#include "ptwalk/targets.hpp"

#include "json.hpp"

#include <array>
#include <filesystem>
#include <vector>

namespace ptwalk {

//! Stored draws from one region together with log gamma at each draw.
struct RegionSample
{
  Eigen::MatrixXd points; //!< N x d, one draw per row
  int region_id = 1;      //!< 1 or 2
  Eigen::VectorXd log_gamma;

  Eigen::Index size() const { return points.rows(); }
  int dim() const { return static_cast<int>(points.cols()); }
};

//! Evaluates log gamma at every row. Throws DataError when a value is not
//! finite (point outside the support) and InputError when N < 2.
RegionSample
make_region_sample(Eigen::MatrixXd points, int region_id, const TargetDensity& target);

enum class BandwidthRule
{
  scott,
  silverman,
  fixed
};

struct LooKdeConfig
{
  BandwidthRule rule = BandwidthRule::scott;
  double fixed_h = 1.0; //!< used by BandwidthRule::fixed
};

//! Per-coordinate bandwidths of the product Gaussian kernel, computed once
//! from the whole sample.
Eigen::VectorXd
kde_bandwidths(const RegionSample& sample, const LooKdeConfig& cfg);

//! log of (1/(N-1)) sum_{k != i} K_h(x - X_k).
double
log_kde_eval_loo(const RegionSample& sample,
                 const Eigen::VectorXd& bandwidth,
                 Eigen::Index i,
                 const Point& x);

double
kde_eval_loo(const RegionSample& sample,
             const LooKdeConfig& cfg,
             Eigen::Index i,
             const Point& x);

//! pi_hat^{(-i)}(X_i) / gamma(X_i), computed in log space.
double
unbiased_ratio(const RegionSample& sample, const LooKdeConfig& cfg, Eigen::Index i);

//! All N ratios of a sample.
Eigen::VectorXd
ratio_vector(const RegionSample& sample, const LooKdeConfig& cfg);

struct IndexChainState
{
  int region = 1;          //!< 1 or 2
  Eigen::Index index = 0;  //!< 0-based row within the region's sample
};

//! Ratio vectors with their totals; leave-one-out sums are total minus own term.
struct RatioTable
{
  Eigen::VectorXd r1;
  Eigen::VectorXd r2;
  double sum1 = 0.0;
  double sum2 = 0.0;

  RatioTable(Eigen::VectorXd ratios_1, Eigen::VectorXd ratios_2);
  const Eigen::VectorXd& ratios(int region) const { return region == 1 ? r1 : r2; }
  double loo_sum(int region, Eigen::Index i) const;
};

struct JumpOutcome
{
  IndexChainState state;
  bool accepted = false;
  double accept_prob = 0.0;
};

//! One jumping-modes iteration: propose the other region and a uniform index,
//! accept with min{1, sum_{k!=i} r_m / sum_{l!=j} r_n}.
JumpOutcome
jump_step(const IndexChainState& state, const RatioTable& ratios, Rng& rng);

struct CombineResult
{
  //! trace[0] is the initial state (1, 0); trace[t] follows step t.
  std::vector<IndexChainState> trace;
  double acceptance = 0.0;
  std::array<double, 2> occupancy{}; //!< over steps 1..iters
  Eigen::VectorXd bandwidth_1;
  Eigen::VectorXd bandwidth_2;
  bool overlap_warning = false;
  double mean_ratio_1 = 0.0;
  double mean_ratio_2 = 0.0;
};

//! True if some point of `a` lies within one bandwidth (scaled Euclidean
//! distance < 1, using the larger bandwidth per coordinate) of some point of `b`.
bool
samples_overlap(const RegionSample& a,
                const RegionSample& b,
                const Eigen::VectorXd& ha,
                const Eigen::VectorXd& hb);

//! Throws InputError if iters == 0 or the samples disagree in dimension.
CombineResult
combine_run(const RegionSample& sample_1,
            const RegionSample& sample_2,
            const LooKdeConfig& cfg,
            std::size_t iters,
            Rng& rng);

//! Chain over precomputed ratios (no KDE work).
CombineResult
combine_run(const RatioTable& ratios, std::size_t iters, Rng& rng);

//! Region m with probability w_m, then a uniform index within it.
std::vector<IndexChainState>
resample_oracle(const RegionSample& sample_1,
                const RegionSample& sample_2,
                double w1,
                double w2,
                std::size_t n,
                Rng& rng);

//! Rows `step,region,index,x_0..x_{d-1}`.
void
write_combined_csv(const std::filesystem::path& path,
                   const std::vector<IndexChainState>& trace,
                   const RegionSample& sample_1,
                   const RegionSample& sample_2);

nlohmann::json
summary_json(const CombineResult& r);

} // namespace ptwalk
