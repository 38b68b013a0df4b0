#include "ptwalk/combine.hpp"

#include "ptwalk/error.hpp"
#include "ptwalk/trace_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

namespace ptwalk {

namespace {

void
check_index(const RegionSample& s, Eigen::Index i)
{
  if (i < 0 || i >= s.size())
    throw InputError("sample index " + std::to_string(i) + " out of range [0, " +
                     std::to_string(s.size()) + ")");
}

} // namespace

RegionSample
make_region_sample(Eigen::MatrixXd points, int region_id, const TargetDensity& target)
{
  if (points.rows() < 2)
    throw InputError("region sample needs at least 2 points");
  if (points.cols() != target.dim())
    throw InputError("region sample has dimension " + std::to_string(points.cols()) +
                     ", target expects " + std::to_string(target.dim()));
  if (region_id != 1 && region_id != 2)
    throw InputError("region id must be 1 or 2");
  RegionSample s{ std::move(points), region_id, {} };
  s.log_gamma.resize(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    s.log_gamma[i] = target.log_density(s.points.row(i).transpose());
    if (!std::isfinite(s.log_gamma[i]))
      throw DataError("region " + std::to_string(region_id) + " point " +
                      std::to_string(i) + " lies outside the target support");
  }
  return s;
}

Eigen::VectorXd
kde_bandwidths(const RegionSample& sample, const LooKdeConfig& cfg)
{
  const int d = sample.dim();
  const double n = static_cast<double>(sample.size());
  if (cfg.rule == BandwidthRule::fixed) {
    if (!(cfg.fixed_h > 0.0))
      throw ConfigError("fixed bandwidth must be positive");
    return Eigen::VectorXd::Constant(d, cfg.fixed_h);
  }
  const double factor = cfg.rule == BandwidthRule::scott
                          ? std::pow(n, -1.0 / (d + 4.0))
                          : std::pow(4.0 / ((d + 2.0) * n), 1.0 / (d + 4.0));
  Eigen::VectorXd h(d);
  for (int j = 0; j < d; ++j) {
    const auto col = sample.points.col(j);
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().sum() / (n - 1.0));
    h[j] = sd * factor;
    if (!(h[j] > 0.0))
      throw ConfigError("bandwidth for coordinate " + std::to_string(j) +
                        " is not positive (constant sample?)");
  }
  return h;
}

double
log_kde_eval_loo(const RegionSample& sample,
                 const Eigen::VectorXd& bandwidth,
                 Eigen::Index i,
                 const Point& x)
{
  check_index(sample, i);
  const Eigen::Index n = sample.size();
  const int d = sample.dim();
  const double log_norm = -0.5 * d * std::log(2.0 * std::numbers::pi) -
                          bandwidth.array().log().sum() -
                          std::log(static_cast<double>(n - 1));
  const Eigen::ArrayXd inv_h = bandwidth.array().inverse();

  Eigen::VectorXd expo(n - 1);
  Eigen::Index m = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k == i)
      continue;
    const double q =
      ((x.transpose().array() - sample.points.row(k).array()) * inv_h.transpose()).square().sum();
    expo[m] = -0.5 * q;
    best = std::max(best, expo[m]);
    ++m;
  }
  const double acc = (expo.array() - best).exp().sum();
  return log_norm + best + std::log(acc);
}

double
kde_eval_loo(const RegionSample& sample,
             const LooKdeConfig& cfg,
             Eigen::Index i,
             const Point& x)
{
  return std::exp(log_kde_eval_loo(sample, kde_bandwidths(sample, cfg), i, x));
}

double
unbiased_ratio(const RegionSample& sample, const LooKdeConfig& cfg, Eigen::Index i)
{
  check_index(sample, i);
  const Eigen::VectorXd h = kde_bandwidths(sample, cfg);
  return std::exp(log_kde_eval_loo(sample, h, i, sample.points.row(i).transpose()) -
                  sample.log_gamma[i]);
}

Eigen::VectorXd
ratio_vector(const RegionSample& sample, const LooKdeConfig& cfg)
{
  const Eigen::VectorXd h = kde_bandwidths(sample, cfg);
  Eigen::VectorXd r(sample.size());
  for (Eigen::Index i = 0; i < sample.size(); ++i)
    r[i] = std::exp(log_kde_eval_loo(sample, h, i, sample.points.row(i).transpose()) -
                    sample.log_gamma[i]);
  return r;
}

RatioTable::RatioTable(Eigen::VectorXd ratios_1, Eigen::VectorXd ratios_2)
  : r1(std::move(ratios_1))
  , r2(std::move(ratios_2))
  , sum1(r1.sum())
  , sum2(r2.sum())
{
  if (r1.size() < 2 || r2.size() < 2)
    throw InputError("ratio vectors need at least 2 entries");
  if (!r1.allFinite() || !r2.allFinite() || (r1.array() < 0.0).any() ||
      (r2.array() < 0.0).any())
    throw DataError("ratio vectors must be finite and nonnegative");
}

double
RatioTable::loo_sum(int region, Eigen::Index i) const
{
  return region == 1 ? sum1 - r1[i] : sum2 - r2[i];
}

JumpOutcome
jump_step(const IndexChainState& state, const RatioTable& ratios, Rng& rng)
{
  const int other = 3 - state.region;
  const Eigen::Index n_other = ratios.ratios(other).size();
  const Eigen::Index j = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n_other)));
  const double omega = rng.uniform();

  const double num = ratios.loo_sum(state.region, state.index);
  const double den = ratios.loo_sum(other, j);
  const double prob = den > 0.0 ? std::min(1.0, num / den) : 1.0;

  JumpOutcome out{ state, false, prob };
  if (omega <= prob) {
    out.state = { other, j };
    out.accepted = true;
  }
  return out;
}

bool
samples_overlap(const RegionSample& a,
                const RegionSample& b,
                const Eigen::VectorXd& ha,
                const Eigen::VectorXd& hb)
{
  const Eigen::ArrayXd inv_h = ha.cwiseMax(hb).array().inverse();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const Eigen::ArrayXd pa = a.points.row(i).transpose().array();
    for (Eigen::Index k = 0; k < b.size(); ++k) {
      const double q =
        ((pa - b.points.row(k).transpose().array()) * inv_h).square().sum();
      if (q < 1.0)
        return true;
    }
  }
  return false;
}

CombineResult
combine_run(const RatioTable& ratios, std::size_t iters, Rng& rng)
{
  if (iters == 0)
    throw InputError("combine_run: iters must be at least 1");
  CombineResult res;
  res.trace.reserve(iters + 1);
  IndexChainState state{ 1, 0 };
  res.trace.push_back(state);
  std::size_t accepted = 0;
  std::size_t in_region_1 = 0;
  for (std::size_t t = 0; t < iters; ++t) {
    const JumpOutcome o = jump_step(state, ratios, rng);
    accepted += o.accepted;
    state = o.state;
    in_region_1 += state.region == 1;
    res.trace.push_back(state);
  }
  const double n = static_cast<double>(iters);
  res.acceptance = static_cast<double>(accepted) / n;
  res.occupancy = { static_cast<double>(in_region_1) / n,
                    1.0 - static_cast<double>(in_region_1) / n };
  res.mean_ratio_1 = ratios.r1.mean();
  res.mean_ratio_2 = ratios.r2.mean();
  return res;
}

CombineResult
combine_run(const RegionSample& sample_1,
            const RegionSample& sample_2,
            const LooKdeConfig& cfg,
            std::size_t iters,
            Rng& rng)
{
  if (iters == 0)
    throw InputError("combine_run: iters must be at least 1");
  if (sample_1.dim() != sample_2.dim())
    throw InputError("combine_run: samples differ in dimension");
  const Eigen::VectorXd h1 = kde_bandwidths(sample_1, cfg);
  const Eigen::VectorXd h2 = kde_bandwidths(sample_2, cfg);
  CombineResult res =
    combine_run(RatioTable(ratio_vector(sample_1, cfg), ratio_vector(sample_2, cfg)),
                iters, rng);
  res.bandwidth_1 = h1;
  res.bandwidth_2 = h2;
  res.overlap_warning = samples_overlap(sample_1, sample_2, h1, h2);
  return res;
}

std::vector<IndexChainState>
resample_oracle(const RegionSample& sample_1,
                const RegionSample& sample_2,
                double w1,
                double w2,
                std::size_t n,
                Rng& rng)
{
  if (!(w1 >= 0.0 && w2 >= 0.0) || std::abs(w1 + w2 - 1.0) > 1e-12)
    throw InputError("resample_oracle: weights must be nonnegative and sum to 1");
  std::vector<IndexChainState> out;
  out.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const int region = rng.uniform() < w1 ? 1 : 2;
    const auto size = region == 1 ? sample_1.size() : sample_2.size();
    out.push_back({ region, static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(size))) });
  }
  return out;
}

void
write_combined_csv(const std::filesystem::path& path,
                   const std::vector<IndexChainState>& trace,
                   const RegionSample& sample_1,
                   const RegionSample& sample_2)
{
  std::ofstream out(path);
  if (!out)
    throw DataError("cannot write '" + path.string() + "'");
  const int d = sample_1.dim();
  out << "step,region,index";
  for (int j = 0; j < d; ++j)
    out << ",x_" << j;
  out << '\n';
  for (std::size_t t = 0; t < trace.size(); ++t) {
    const auto& s = trace[t];
    const auto& pts = s.region == 1 ? sample_1.points : sample_2.points;
    out << t << ',' << s.region << ',' << s.index;
    for (int j = 0; j < d; ++j)
      out << ',' << format_real(pts(s.index, j));
    out << '\n';
  }
}

nlohmann::json
summary_json(const CombineResult& r)
{
  auto vec = [](const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  return { { "iters", r.trace.empty() ? 0 : r.trace.size() - 1 },
           { "acceptance", r.acceptance },
           { "occupancy", { r.occupancy[0], r.occupancy[1] } },
           { "bandwidths", { vec(r.bandwidth_1), vec(r.bandwidth_2) } },
           { "mean_ratio", { r.mean_ratio_1, r.mean_ratio_2 } },
           { "overlap_warning", r.overlap_warning } };
}

} // namespace ptwalk
