#pragma once

#include "ptwalk/twalk.hpp"

#include "json.hpp"

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ptwalk {

struct IatResult
{
  double tau = 1.0;
  //! Series had zero variance; tau is reported as 1.
  bool degenerate = false;
};

//! Integrated autocorrelation time 1 + 2 sum_k rho_k, Geyer's initial positive
//! sequence estimator, clipped below at 1. Requires at least 100 values.
IatResult
iat(std::span<const double> series);

//! Coordinate `coord` of the x-component over retained states after burn-in
//! (state iteration > burn_in).
std::vector<double>
coordinate_series(const Trace& trace, int coord, std::size_t burn_in = 0);

//! Mean of h(X_t) over retained states with t > burn_in.
double
ergodic_average(const Trace& trace,
                const std::function<double(const Point&)>& h,
                std::size_t burn_in);

//! Index of the nearest centre (Euclidean) for each point.
std::vector<int>
classify_nearest(const std::vector<Point>& points, const std::vector<Point>& centres);

std::vector<double>
mode_occupancy(const std::vector<Point>& points, const std::vector<Point>& centres);

std::vector<double>
mode_occupancy(const Trace& trace,
               const std::vector<Point>& centres,
               std::size_t burn_in = 0);

//! Number of label changes along a sequence.
std::size_t
count_switches(const std::vector<int>& labels);

std::vector<Point>
retained_x(const Trace& trace, std::size_t burn_in = 0);

//! Two-dimensional marginal KDE on a regular grid; density(i, j) is the value
//! at (xs[i], ys[j]). Bounds are the data range padded by 10% on each side.
struct KdeGrid
{
  std::array<int, 2> dims{ 0, 1 };
  Eigen::VectorXd xs;
  Eigen::VectorXd ys;
  Eigen::MatrixXd density;
  std::array<double, 2> bandwidth{};

  double cell_area() const;
};

//! Product Gaussian kernel; Scott's rule per axis unless `bandwidth` is given.
KdeGrid
kde_grid(const Eigen::MatrixXd& points,
         std::array<int, 2> dims,
         int resolution,
         std::optional<std::array<double, 2>> bandwidth = std::nullopt);

//! CSV with columns x,y,density.
void
write_kde_grid_csv(const std::filesystem::path& path, const KdeGrid& grid);

struct DiagnosticsReport
{
  std::vector<double> iat_per_coordinate;
  std::vector<double> ess;
  std::vector<bool> degenerate;
  double global_acceptance = 0.0;
  //! Only kinds that were proposed at least once.
  std::map<std::string, double> per_move_acceptance;
  std::map<std::string, double> move_fractions;
  std::vector<double> mode_occupancy;
  std::size_t retained = 0;
  std::size_t burn_in = 0;
};

DiagnosticsReport
make_report(const Trace& trace,
            const std::vector<Point>& centres,
            std::size_t burn_in = 0);

nlohmann::json
to_json(const DiagnosticsReport& r);

} // namespace ptwalk
