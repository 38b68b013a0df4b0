#pragma once

#include <cstdint>
#include <random>

namespace ptwalk {

//! Stream identifiers used to derive independent generators from one seed.
//! Every subcommand draws from its own stream so results do not depend on
//! which other subcommands ran before.
namespace streams {
inline constexpr std::uint64_t chain = 0;
inline constexpr std::uint64_t combine = 1;
inline constexpr std::uint64_t draw = 2;
inline constexpr std::uint64_t resample = 3;
//! table1 cell k uses stream `table1_base + k`.
inline constexpr std::uint64_t table1_base = 1000;
} // namespace streams

//! Random number generator handle. Not shared between chains.
class Rng
{
public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  //! Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  double chi_squared(double df);
  //! Uniform on {0, ..., n - 1}.
  std::size_t index(std::size_t n);
  bool coin() { return uniform() < 0.5; }

  std::mt19937_64& engine() { return engine_; }

private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{ 0.0, 1.0 };
};

} // namespace ptwalk
