#include "ptwalk/rng.hpp"

namespace ptwalk {

namespace {

std::uint64_t
splitmix64(std::uint64_t& state)
{
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::mt19937_64
make_engine(std::uint64_t seed, std::uint64_t stream)
{
  std::uint64_t state = seed ^ (0xD1B54A32D192ED03ULL * (stream + 1));
  std::seed_seq seq{ static_cast<std::uint32_t>(splitmix64(state)),
                     static_cast<std::uint32_t>(splitmix64(state)),
                     static_cast<std::uint32_t>(splitmix64(state)),
                     static_cast<std::uint32_t>(splitmix64(state)) };
  return std::mt19937_64(seq);
}

} // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
  : engine_(make_engine(seed, stream))
{
}

double
Rng::uniform()
{
  // 53 random bits, shifted by half an ulp so neither 0 nor 1 is produced
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double
Rng::normal()
{
  return normal_(engine_);
}

double
Rng::chi_squared(double df)
{
  std::gamma_distribution<double> gamma(0.5 * df, 2.0);
  return gamma(engine_);
}

std::size_t
Rng::index(std::size_t n)
{
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

} // namespace ptwalk
