#include "ptwalk/diagnostics.hpp"

#include "ptwalk/error.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <numbers>

namespace ptwalk {

namespace {

std::size_t
next_pow2(std::size_t n)
{
  std::size_t p = 1;
  while (p < n)
    p <<= 1;
  return p;
}

//! Biased autocovariance (divisor n) at every lag via zero-padded FFT.
std::vector<double>
autocovariance(std::span<const double> series)
{
  const std::size_t n = series.size();
  double mean = 0.0;
  for (double v : series)
    mean += v;
  mean /= static_cast<double>(n);

  std::vector<double> padded(2 * next_pow2(n), 0.0);
  for (std::size_t i = 0; i < n; ++i)
    padded[i] = series[i] - mean;

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> freq;
  fft.fwd(freq, padded);
  for (auto& c : freq)
    c = c * std::conj(c);
  std::vector<std::complex<double>> back;
  fft.inv(back, freq);

  std::vector<double> acov(n);
  for (std::size_t k = 0; k < n; ++k)
    acov[k] = back[k].real() / static_cast<double>(n);
  return acov;
}

double
scott_bandwidth(const Eigen::VectorXd& v, int d)
{
  const double n = static_cast<double>(v.size());
  const double mean = v.mean();
  const double sd = std::sqrt((v.array() - mean).square().sum() / std::max(n - 1.0, 1.0));
  return sd * std::pow(n, -1.0 / (d + 4.0));
}

} // namespace

IatResult
iat(std::span<const double> series)
{
  if (series.size() < 100)
    throw InputError("iat: series needs at least 100 values");
  const auto acov = autocovariance(series);
  const double var = acov[0];
  double scale = 0.0;
  for (double v : series)
    scale = std::max(scale, std::abs(v));
  if (!(var > 1e-28 * std::max(scale * scale, 1e-300)))
    return { 1.0, true };

  // initial positive sequence: sum pair sums Gamma_m while they stay positive
  double sum = 0.0;
  for (std::size_t m = 0; 2 * m + 1 < acov.size(); ++m) {
    const double pair = acov[2 * m] + acov[2 * m + 1];
    if (!(pair > 0.0))
      break;
    sum += pair;
  }
  const double tau = (2.0 * sum - var) / var;
  return { std::max(tau, 1.0), false };
}

std::vector<double>
coordinate_series(const Trace& trace, int coord, std::size_t burn_in)
{
  std::vector<double> out;
  out.reserve(trace.states.size());
  for (std::size_t k = 0; k < trace.states.size(); ++k)
    if (trace.state_iters[k] > burn_in || (burn_in == 0 && k == 0))
      out.push_back(trace.states[k].x[coord]);
  return out;
}

std::vector<Point>
retained_x(const Trace& trace, std::size_t burn_in)
{
  std::vector<Point> out;
  out.reserve(trace.states.size());
  for (std::size_t k = 0; k < trace.states.size(); ++k)
    if (trace.state_iters[k] > burn_in || (burn_in == 0 && k == 0))
      out.push_back(trace.states[k].x);
  return out;
}

double
ergodic_average(const Trace& trace,
                const std::function<double(const Point&)>& h,
                std::size_t burn_in)
{
  if (trace.records.empty() ? burn_in > 0 : burn_in >= trace.records.size())
    throw InputError("ergodic_average: burn-in must be shorter than the run");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < trace.states.size(); ++k)
    if (trace.state_iters[k] > burn_in) {
      sum += h(trace.states[k].x);
      ++count;
    }
  if (count == 0)
    throw InputError("ergodic_average: no retained states after burn-in");
  return sum / static_cast<double>(count);
}

std::vector<int>
classify_nearest(const std::vector<Point>& points, const std::vector<Point>& centres)
{
  if (centres.empty())
    throw InputError("mode classification needs at least one centre");
  std::vector<int> labels(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centres.size(); ++c) {
      const double dist = (points[i] - centres[c]).squaredNorm();
      if (dist < best) {
        best = dist;
        labels[i] = static_cast<int>(c);
      }
    }
  }
  return labels;
}

std::vector<double>
mode_occupancy(const std::vector<Point>& points, const std::vector<Point>& centres)
{
  const auto labels = classify_nearest(points, centres);
  std::vector<double> occ(centres.size(), 0.0);
  if (labels.empty())
    return occ;
  for (int l : labels)
    occ[l] += 1.0;
  for (auto& o : occ)
    o /= static_cast<double>(labels.size());
  return occ;
}

std::vector<double>
mode_occupancy(const Trace& trace, const std::vector<Point>& centres, std::size_t burn_in)
{
  return mode_occupancy(retained_x(trace, burn_in), centres);
}

std::size_t
count_switches(const std::vector<int>& labels)
{
  std::size_t n = 0;
  for (std::size_t i = 1; i < labels.size(); ++i)
    n += labels[i] != labels[i - 1];
  return n;
}

double
KdeGrid::cell_area() const
{
  return (xs[1] - xs[0]) * (ys[1] - ys[0]);
}

KdeGrid
kde_grid(const Eigen::MatrixXd& points,
         std::array<int, 2> dims,
         int resolution,
         std::optional<std::array<double, 2>> bandwidth)
{
  if (points.rows() < 2)
    throw InputError("kde_grid: at least 2 points are required");
  if (resolution < 2)
    throw InputError("kde_grid: resolution must be at least 2");
  for (int d : dims)
    if (d < 0 || d >= points.cols())
      throw InputError("kde_grid: coordinate index out of range");

  KdeGrid g;
  g.dims = dims;
  std::array<Eigen::VectorXd, 2> axes;
  for (int a = 0; a < 2; ++a) {
    const Eigen::VectorXd col = points.col(dims[a]);
    const double lo = col.minCoeff();
    const double hi = col.maxCoeff();
    const double pad = hi > lo ? 0.1 * (hi - lo) : 1.0;
    axes[a] = Eigen::VectorXd::LinSpaced(resolution, lo - pad, hi + pad);
    double h = bandwidth ? (*bandwidth)[a] : scott_bandwidth(col, 2);
    if (!(h > 0.0))
      h = 1e-3 * (hi > lo ? hi - lo : 1.0);
    g.bandwidth[a] = h;
  }
  g.xs = axes[0];
  g.ys = axes[1];
  g.density = Eigen::MatrixXd::Zero(resolution, resolution);

  const double hx = g.bandwidth[0];
  const double hy = g.bandwidth[1];
  const double dx = g.xs[1] - g.xs[0];
  const double dy = g.ys[1] - g.ys[0];
  constexpr double cutoff = 7.0; // kernel support truncated at 7 bandwidths
  const double norm =
    1.0 / (2.0 * std::numbers::pi * hx * hy * static_cast<double>(points.rows()));
  Eigen::VectorXd kx(resolution), ky(resolution);
  for (Eigen::Index p = 0; p < points.rows(); ++p) {
    const double px = points(p, dims[0]);
    const double py = points(p, dims[1]);
    const int ix0 = std::max(0, static_cast<int>(std::floor((px - cutoff * hx - g.xs[0]) / dx)));
    const int ix1 = std::min(resolution - 1, static_cast<int>(std::ceil((px + cutoff * hx - g.xs[0]) / dx)));
    const int iy0 = std::max(0, static_cast<int>(std::floor((py - cutoff * hy - g.ys[0]) / dy)));
    const int iy1 = std::min(resolution - 1, static_cast<int>(std::ceil((py + cutoff * hy - g.ys[0]) / dy)));
    for (int i = ix0; i <= ix1; ++i) {
      const double z = (g.xs[i] - px) / hx;
      kx[i] = std::exp(-0.5 * z * z);
    }
    for (int j = iy0; j <= iy1; ++j) {
      const double z = (g.ys[j] - py) / hy;
      ky[j] = std::exp(-0.5 * z * z);
    }
    for (int i = ix0; i <= ix1; ++i)
      for (int j = iy0; j <= iy1; ++j)
        g.density(i, j) += norm * kx[i] * ky[j];
  }
  return g;
}

void
write_kde_grid_csv(const std::filesystem::path& path, const KdeGrid& grid)
{
  std::ofstream out(path);
  if (!out)
    throw DataError("cannot write '" + path.string() + "'");
  out << "x,y,density\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < grid.xs.size(); ++i)
    for (Eigen::Index j = 0; j < grid.ys.size(); ++j)
      out << grid.xs[i] << ',' << grid.ys[j] << ',' << grid.density(i, j) << '\n';
}

DiagnosticsReport
make_report(const Trace& trace, const std::vector<Point>& centres, std::size_t burn_in)
{
  DiagnosticsReport r;
  r.burn_in = burn_in;
  const auto d = trace.states.empty() ? 0 : static_cast<int>(trace.states.front().x.size());
  for (int c = 0; c < d; ++c) {
    const auto s = coordinate_series(trace, c, burn_in);
    r.retained = s.size();
    if (s.size() >= 100) {
      const auto res = iat(s);
      r.iat_per_coordinate.push_back(res.tau);
      r.degenerate.push_back(res.degenerate);
      r.ess.push_back(static_cast<double>(s.size()) / res.tau);
    } else {
      r.iat_per_coordinate.push_back(std::numeric_limits<double>::quiet_NaN());
      r.degenerate.push_back(false);
      r.ess.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  const auto total = trace.tally.total_proposed();
  r.global_acceptance =
    total ? static_cast<double>(trace.tally.total_accepted()) / static_cast<double>(total) : 0.0;
  for (MoveKind k : all_move_kinds) {
    const auto idx = static_cast<std::size_t>(k);
    const auto n = trace.tally.proposed[idx];
    if (n == 0)
      continue;
    const std::string key(to_string(k));
    r.per_move_acceptance[key] =
      static_cast<double>(trace.tally.accepted[idx]) / static_cast<double>(n);
    r.move_fractions[key] = static_cast<double>(n) / static_cast<double>(total);
  }
  if (!centres.empty())
    r.mode_occupancy = mode_occupancy(trace, centres, burn_in);
  return r;
}

nlohmann::json
to_json(const DiagnosticsReport& r)
{
  auto num = [](double v) -> nlohmann::json {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
  };
  nlohmann::json j;
  j["iat_per_coordinate"] = nlohmann::json::array();
  j["ess"] = nlohmann::json::array();
  for (std::size_t i = 0; i < r.iat_per_coordinate.size(); ++i) {
    j["iat_per_coordinate"].push_back(num(r.iat_per_coordinate[i]));
    j["ess"].push_back(num(r.ess[i]));
  }
  j["degenerate_coordinates"] = nlohmann::json::array();
  for (std::size_t i = 0; i < r.degenerate.size(); ++i)
    if (r.degenerate[i])
      j["degenerate_coordinates"].push_back(i);
  j["global_acceptance"] = r.global_acceptance;
  j["per_move_acceptance"] = r.per_move_acceptance;
  j["move_fractions"] = r.move_fractions;
  j["mode_occupancy"] = r.mode_occupancy;
  j["retained"] = r.retained;
  j["burn_in"] = r.burn_in;
  return j;
}

} // namespace ptwalk
