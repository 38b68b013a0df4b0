#pragma once

#include "ptwalk/chain_types.hpp"
#include "ptwalk/penalty.hpp"
#include "ptwalk/rng.hpp"
#include "ptwalk/targets.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace ptwalk {

//! t-walk kernel parameters. Base-move forms and defaults follow the public
//! reference t-walk implementation (aw = 1.5, at = 6, n1 = 4, kind weights
//! 0.4918 / 0.4918 / 0.0082 / 0.0082).
struct KernelConfig
{
  //! walk, traverse, hop, blow; must sum to 1.
  std::array<double, 4> base_move_probs{ 0.4918, 0.4918, 0.0082, 0.0082 };
  double penalty_prob = 0.10;
  double walk_param = 1.5;
  double traverse_param = 6.0;
  //! Expected number of coordinates moved by a base move is min(d, n1).
  int coord_update_target = 4;
  PenaltyConfig penalty{};
  std::uint64_t seed = 0;

  void validate() const;
};

struct MoveTally
{
  std::array<std::size_t, all_move_kinds.size()> proposed{};
  std::array<std::size_t, all_move_kinds.size()> accepted{};

  void add(const MoveRecord& r);
  std::size_t total_proposed() const;
  std::size_t total_accepted() const;
};

struct Trace
{
  std::vector<MoveRecord> records;
  //! states[k] is the state after iteration state_iters[k]; states[0] is the
  //! initial state (iteration 0).
  std::vector<PairState> states;
  std::vector<std::size_t> state_iters;
  KernelConfig config{};
  std::size_t thin = 1;
  std::string target_name;
  MoveTally tally{};
};

//! Throws InitError if either point has log gamma = -inf or the points
//! share a coordinate.
PairState
init_chain(const TargetDensity& target,
           const Point& x0,
           const Point& y0,
           const KernelConfig& cfg);

//! Walk map: h_i = m_i + (m_i - p_i) z_i over `subset`, other coordinates
//! copied from m. `factors` has one entry per subset element.
Point
walk_proposal(const Point& m,
              const Point& p,
              const std::vector<int>& subset,
              const std::vector<double>& factors);

//! Traverse map: h_i = p_i + beta (p_i - m_i) over `subset`.
Point
traverse_proposal(const Point& m, const Point& p, const std::vector<int>& subset, double beta);

//! One of walk / traverse / hop / blow, updating x or y (fair coin).
StepResult
base_move(const PairState& state,
          MoveKind kind,
          const TargetDensity& target,
          const KernelConfig& cfg,
          Rng& rng);

//! Penalised move with probability penalty_prob, otherwise a base move.
StepResult
step(const PairState& state,
     const TargetDensity& target,
     const KernelConfig& cfg,
     Rng& rng);

//! `iters` steps from (x0, y0), keeping every `thin`-th state. The generator is
//! Rng(cfg.seed, streams::chain).
Trace
run(const TargetDensity& target,
    const KernelConfig& cfg,
    const Point& x0,
    const Point& y0,
    std::size_t iters,
    std::size_t thin = 1);

//! Same, with an externally owned generator.
Trace
run(const TargetDensity& target,
    const KernelConfig& cfg,
    const Point& x0,
    const Point& y0,
    std::size_t iters,
    std::size_t thin,
    Rng& rng);

} // namespace ptwalk
