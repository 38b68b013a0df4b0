#include "ptwalk/targets.hpp"

#include "ptwalk/error.hpp"
#include "ptwalk/rng.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace ptwalk {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

std::string
field(std::size_t k, const char* name)
{
  return "components[" + std::to_string(k) + "]." + name;
}

struct Component
{
  double log_norm; // log weight - log normalising constant
  Point mean;
  Eigen::LLT<Eigen::MatrixXd> chol;
  double b;
};

class Mixture
{
public:
  explicit Mixture(const GaussianMixtureSpec& spec)
  {
    const int d = spec.dim();
    for (std::size_t k = 0; k < spec.weights.size(); ++k) {
      Component c{ 0.0, spec.means[k], spec.covariances[k].llt(), 0.0 };
      double log_det = 0.0;
      for (int i = 0; i < d; ++i)
        log_det += 2.0 * std::log(c.chol.matrixL()(i, i));
      c.log_norm = std::log(spec.weights[k]) -
                   0.5 * d * std::log(2.0 * std::numbers::pi) - 0.5 * log_det;
      if (spec.banana_b)
        c.b = (*spec.banana_b)[k];
      components_.push_back(std::move(c));
    }
  }

  double log_density(const Point& x) const
  {
    double best = neg_inf;
    Eigen::VectorXd lc(components_.size());
    for (std::size_t k = 0; k < components_.size(); ++k) {
      lc[k] = component_log(components_[k], x, nullptr);
      best = std::max(best, lc[k]);
    }
    return log_sum_exp(lc, best);
  }

  Point gradient(const Point& x) const
  {
    const auto n = components_.size();
    Eigen::VectorXd lc(n);
    std::vector<Point> grads(n);
    double best = neg_inf;
    for (std::size_t k = 0; k < n; ++k) {
      lc[k] = component_log(components_[k], x, &grads[k]);
      best = std::max(best, lc[k]);
    }
    const double total = log_sum_exp(lc, best);
    Point g = Point::Zero(x.size());
    if (!std::isfinite(total))
      return g;
    for (std::size_t k = 0; k < n; ++k) {
      const double resp = std::exp(lc[k] - total);
      if (resp > 0.0)
        g += resp * grads[k];
    }
    return g;
  }

private:
  static double log_sum_exp(const Eigen::VectorXd& v, double best)
  {
    if (!std::isfinite(best))
      return neg_inf;
    double acc = 0.0;
    for (double e : v)
      acc += std::exp(e - best);
    return best + std::log(acc);
  }

  static double component_log(const Component& c, const Point& x, Point* grad)
  {
    Point z = (c.b != 0.0 ? banana_map(x, c.b) : x) - c.mean;
    Point white = c.chol.matrixL().solve(z);
    if (grad) {
      Point s = c.chol.matrixU().solve(white);
      *grad = -s;
      (*grad)[0] *= 1.0 + 2.0 * c.b * x[0];
    }
    return c.log_norm - 0.5 * white.squaredNorm();
  }

  std::vector<Component> components_;
};

//! Point whose banana image is the component mean.
Point
component_centre(const Point& mean, double b)
{
  Point c = mean;
  if (b == 0.0)
    return c;
  const double disc = 1.0 + 4.0 * b * (100.0 * b + mean[0]);
  c[0] = disc >= 0.0 ? (-1.0 + std::sqrt(disc)) / (2.0 * b) : -1.0 / (2.0 * b);
  return c;
}

} // namespace

TargetDensity::TargetDensity(std::string name,
                             int dim,
                             LogFn log_gamma,
                             GradFn grad_log_pi,
                             std::vector<Point> mode_centres)
  : name_(std::move(name))
  , dim_(dim)
  , log_gamma_(std::move(log_gamma))
  , grad_(std::move(grad_log_pi))
  , centres_(std::move(mode_centres))
{
  if (dim_ < 1)
    throw ConfigError("target dimension must be positive");
}

double
TargetDensity::log_density(const Point& x) const
{
  if (x.size() != dim_)
    throw InputError("point has dimension " + std::to_string(x.size()) +
                     ", target '" + name_ + "' expects " +
                     std::to_string(dim_));
  const double v = log_gamma_(x);
  return std::isnan(v) ? neg_inf : v;
}

Point
TargetDensity::grad_log_pi(const Point& x) const
{
  if (!grad_)
    throw ConfigError("target '" + name_ + "' has no gradient");
  if (x.size() != dim_)
    throw InputError("gradient point has wrong dimension");
  return grad_(x);
}

int
GaussianMixtureSpec::dim() const
{
  return means.empty() ? 0 : static_cast<int>(means.front().size());
}

void
GaussianMixtureSpec::validate() const
{
  const auto n = weights.size();
  if (n == 0)
    throw ConfigError("components: at least one component is required");
  if (means.size() != n || covariances.size() != n)
    throw ConfigError("components: weights, means and covariances differ in "
                      "length");
  const int d = dim();
  if (d < 1)
    throw ConfigError("dim must be positive");
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(weights[k] >= 0.0) || !std::isfinite(weights[k]))
      throw ConfigError(field(k, "weight") + ": must be nonnegative");
    total += weights[k];
    if (means[k].size() != d)
      throw ConfigError(field(k, "mean") + ": expected " + std::to_string(d) +
                        " entries");
    if (!means[k].allFinite())
      throw ConfigError(field(k, "mean") + ": non-finite entry");
    const auto& cov = covariances[k];
    if (cov.rows() != d || cov.cols() != d)
      throw ConfigError(field(k, "cov") + ": expected a " + std::to_string(d) +
                        "x" + std::to_string(d) + " matrix");
    const double scale = cov.cwiseAbs().maxCoeff();
    if (!cov.allFinite() || (cov - cov.transpose()).cwiseAbs().maxCoeff() >
                              1e-12 * std::max(scale, 1.0))
      throw ConfigError(field(k, "cov") + ": not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
      throw ConfigError(field(k, "cov") + ": not positive definite");
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ConfigError("weights must sum to 1 (got " + std::to_string(total) +
                      ")");
  if (banana_b) {
    if (banana_b->size() != n)
      throw ConfigError("banana_b: one curvature per component is required");
    for (std::size_t k = 0; k < n; ++k)
      if (!std::isfinite((*banana_b)[k]))
        throw ConfigError(field(k, "banana_b") + ": non-finite");
  }
}

Point
banana_map(const Point& x, double b)
{
  Point out = x;
  out[0] = x[0] + b * x[0] * x[0] - 100.0 * b;
  return out;
}

TargetDensity
make_mixture_target(const GaussianMixtureSpec& spec, std::string name)
{
  spec.validate();
  auto mix = std::make_shared<const Mixture>(spec);
  std::vector<Point> centres;
  for (std::size_t k = 0; k < spec.means.size(); ++k)
    centres.push_back(
      component_centre(spec.means[k], spec.banana_b ? (*spec.banana_b)[k] : 0.0));
  return TargetDensity(
    std::move(name),
    spec.dim(),
    [mix](const Point& x) { return mix->log_density(x); },
    [mix](const Point& x) { return mix->gradient(x); },
    std::move(centres));
}

std::vector<std::string>
builtin_names()
{
  return { "example1", "example1_weighted", "cube9", "banana10" };
}

GaussianMixtureSpec
builtin_spec(const std::string& name)
{
  GaussianMixtureSpec spec;
  if (name == "example1" || name == "example1_weighted") {
    Eigen::Matrix2d s1, s2;
    s1 << 1.0, 0.1, 0.1, 1.0;
    s2 << 16.0, 0.8 * 4.0 * 5.0, 0.8 * 4.0 * 5.0, 25.0;
    spec.weights = name == "example1" ? std::vector<double>{ 0.5, 0.5 }
                                      : std::vector<double>{ 0.1, 0.9 };
    spec.means = { Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(20.0, -20.0) };
    spec.covariances = { s1, s2 };
  } else if (name == "cube9") {
    // vertex variances geometrically spaced over [0.25, 10], lexicographic
    // (a, b, c) order
    int k = 0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c, ++k) {
          const double var = 0.25 * std::pow(40.0, k / 7.0);
          spec.means.push_back(Eigen::Vector3d(a ? -10.0 : 10.0,
                                               b ? -10.0 : 10.0,
                                               c ? -10.0 : 10.0));
          spec.covariances.push_back(var * Eigen::Matrix3d::Identity());
        }
    spec.means.push_back(Eigen::Vector3d(30.0, 30.0, 30.0));
    spec.covariances.push_back(10.0 * Eigen::Matrix3d::Identity());
    spec.weights.assign(9, 1.0 / 9.0);
  } else if (name == "banana10") {
    const int d = 10;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(d, d);
    cov(0, 0) = 100.0;
    for (double m : { -3.0, 0.0, 3.0 }) {
      spec.means.push_back(Point::Constant(d, m));
      spec.covariances.push_back(cov);
    }
    spec.weights.assign(3, 1.0 / 3.0);
    spec.banana_b = std::vector<double>{ -0.03, 0.0, 0.03 };
  } else {
    throw ConfigError("unknown builtin target '" + name +
                      "' (expected example1, example1_weighted, cube9 or "
                      "banana10)");
  }
  return spec;
}

TargetDensity
make_builtin(const std::string& name)
{
  TargetDensity t = make_mixture_target(builtin_spec(name), name);
  if (name != "banana10")
    return t;
  // x1 is the wide curved direction shared by all three components; classify
  // by the separated coordinates only
  std::vector<Point> centres = t.mode_centres();
  for (auto& c : centres)
    c[0] = 0.0;
  return TargetDensity(
    name,
    t.dim(),
    [t](const Point& x) { return t.log_density(x); },
    [t](const Point& x) { return t.grad_log_pi(x); },
    std::move(centres));
}

GaussianMixtureSpec
parse_target_spec(const std::string& json_text)
{
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("target spec: parse failure: ") + e.what());
  }
  if (!doc.is_object())
    throw ConfigError("target spec: top level must be an object");
  if (!doc.contains("dim") || !doc["dim"].is_number_integer())
    throw ConfigError("dim: missing or not an integer");
  const int d = doc["dim"].get<int>();
  if (d < 1)
    throw ConfigError("dim: must be positive");
  if (!doc.contains("components") || !doc["components"].is_array())
    throw ConfigError("components: missing or not an array");

  GaussianMixtureSpec spec;
  bool any_banana = false;
  std::vector<double> bananas;
  const auto& comps = doc["components"];
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const auto& c = comps[k];
    if (!c.is_object())
      throw ConfigError("components[" + std::to_string(k) +
                        "]: must be an object");
    if (!c.contains("weight") || !c["weight"].is_number())
      throw ConfigError(field(k, "weight") + ": missing or not a number");
    spec.weights.push_back(c["weight"].get<double>());

    if (!c.contains("mean") || !c["mean"].is_array() ||
        c["mean"].size() != static_cast<std::size_t>(d))
      throw ConfigError(field(k, "mean") + ": expected an array of " +
                        std::to_string(d) + " numbers");
    Point mean(d);
    for (int i = 0; i < d; ++i) {
      if (!c["mean"][i].is_number())
        throw ConfigError(field(k, "mean") + ": non-numeric entry");
      mean[i] = c["mean"][i].get<double>();
    }
    spec.means.push_back(mean);

    if (!c.contains("cov") || !c["cov"].is_array() ||
        c["cov"].size() != static_cast<std::size_t>(d))
      throw ConfigError(field(k, "cov") + ": expected " + std::to_string(d) +
                        " rows");
    Eigen::MatrixXd cov(d, d);
    for (int i = 0; i < d; ++i) {
      const auto& row = c["cov"][i];
      if (!row.is_array() || row.size() != static_cast<std::size_t>(d))
        throw ConfigError(field(k, "cov") + ": row " + std::to_string(i) +
                          " must have " + std::to_string(d) + " entries");
      for (int j = 0; j < d; ++j) {
        if (!row[j].is_number())
          throw ConfigError(field(k, "cov") + ": non-numeric entry");
        cov(i, j) = row[j].get<double>();
      }
    }
    spec.covariances.push_back(cov);

    double b = 0.0;
    if (c.contains("banana_b")) {
      if (!c["banana_b"].is_number())
        throw ConfigError(field(k, "banana_b") + ": not a number");
      b = c["banana_b"].get<double>();
      any_banana = true;
    }
    bananas.push_back(b);
  }
  if (any_banana)
    spec.banana_b = bananas;
  spec.validate();
  return spec;
}

TargetDensity
load_target_spec(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot read target spec '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return make_mixture_target(parse_target_spec(buf.str()),
                             path.stem().string());
}

TargetDensity
resolve_target(const std::string& name_or_path)
{
  for (const auto& n : builtin_names())
    if (n == name_or_path)
      return make_builtin(n);
  if (std::filesystem::exists(name_or_path))
    return load_target_spec(name_or_path);
  throw ConfigError("target '" + name_or_path +
                    "' is neither a builtin nor a readable spec file");
}

TargetDensity
make_uniform_box(int dim, double lo, double hi)
{
  if (!(hi > lo))
    throw ConfigError("uniform box needs hi > lo");
  return TargetDensity(
    "uniform_box",
    dim,
    [lo, hi](const Point& x) {
      return ((x.array() >= lo) && (x.array() <= hi)).all() ? 0.0 : neg_inf;
    },
    [](const Point& x) { return Point::Zero(x.size()); },
    { Point::Constant(dim, 0.5 * (lo + hi)) });
}

TargetDensity
make_standard_gaussian(int dim)
{
  const double c = -0.5 * dim * std::log(2.0 * std::numbers::pi);
  return TargetDensity(
    "standard_gaussian",
    dim,
    [c](const Point& x) { return c - 0.5 * x.squaredNorm(); },
    [](const Point& x) -> Point { return -x; },
    { Point::Zero(dim) });
}

Eigen::MatrixXd
draw_component(const GaussianMixtureSpec& spec, std::size_t k, std::size_t n, Rng& rng)
{
  spec.validate();
  if (k >= spec.means.size())
    throw ConfigError("component index " + std::to_string(k) + " out of range");
  if (spec.banana_b && (*spec.banana_b)[k] != 0.0)
    throw ConfigError(field(k, "banana_b") + ": exact draws need a Gaussian component");
  const int d = spec.dim();
  const Eigen::MatrixXd chol = spec.covariances[k].llt().matrixL();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), d);
  Eigen::VectorXd z(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j)
      z[j] = rng.normal();
    out.row(static_cast<Eigen::Index>(i)) = (spec.means[k] + chol * z).transpose();
  }
  return out;
}

} // namespace ptwalk
