#pragma once

#include "ptwalk/targets.hpp"

#include <array>
#include <optional>
#include <string_view>

namespace ptwalk {

enum class MoveKind
{
  walk,
  traverse,
  hop,
  blow,
  penalty
};

inline constexpr std::array<MoveKind, 5> all_move_kinds{
  MoveKind::walk, MoveKind::traverse, MoveKind::hop, MoveKind::blow,
  MoveKind::penalty
};

std::string_view
to_string(MoveKind kind);

//! Throws InputError for unknown names.
MoveKind
move_kind_from_string(std::string_view name);

//! Extended state (x, y) of the t-walk with cached log gamma values.
struct PairState
{
  Point x;
  Point y;
  double log_gamma_x = 0.0;
  double log_gamma_y = 0.0;
};

struct MoveRecord
{
  std::size_t iter = 0;
  MoveKind kind = MoveKind::walk;
  bool accepted = false;
  double log_mh_ratio = 0.0;
  //! Penalty move only; number of Alg.-2 style rejection trials used.
  std::optional<int> rejection_trials;
  //! Proposal sampler failed (trial cap reached or unusable gradient); the
  //! move was recorded as rejected.
  bool sampler_failed = false;
};

struct StepResult
{
  PairState state;
  MoveRecord record;
};

} // namespace ptwalk
