#ifndef PZF_RNG_HPP
#define PZF_RNG_HPP

// Deterministic randomness for the whole lab.
//
// Every stream is derived from a 64-bit master seed through the splitmix64
// finalizer, so a (master_seed, index) pair names the same stream on every
// platform. The engine is std::mt19937_64 (bit-identical everywhere by
// standard), but all mapping from raw 64-bit words to distributions is done
// here by hand: the standard <random> distributions are allowed to differ
// across library implementations, which would break byte-identical replays.

#include <cmath>
#include <cstdint>
#include <random>

namespace pzf {

// splitmix64 finalizer (public domain constants, Steele/Lea/Flood).
inline constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// k-th derived seed: the (k+1)-th output of the splitmix64 stream started at
// `master`. Used for trial seeds, graph seeds and per-vertex sub-streams.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t k) {
  return mix64(master + k * 0x9e3779b97f4a7c15ULL);
}

// Domain tags keep independent purposes on non-overlapping streams even when
// they share a master seed.
inline constexpr std::uint64_t SEED_DOMAIN_GRAPH = 0x67726170685f5f5fULL;
inline constexpr std::uint64_t SEED_DOMAIN_TRIAL = 0x747269616c5f5f5fULL;

// Stateless counter-based draw: uniform in [0,1) indexed by up to four
// coordinates. Couplings use this so that both coupled processes can look up
// the same (round, edge, tag) decision without sharing engine state.
inline double counter_u01(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c, std::uint64_t d = 0) {
  std::uint64_t h = mix64(seed ^ mix64(a));
  h = mix64(h ^ mix64(b + 0x510e527fade682d1ULL));
  h = mix64(h ^ mix64(c + 0x9b05688c2b3e6c1fULL));
  h = mix64(h ^ mix64(d + 0x1f83d9abfb41bd6bULL));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Sequential stream with hand-rolled distribution mapping.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Canonical uniform in [0,1): top 53 bits, exactly representable.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform in {0, ..., n-1}. Modulo bias is < n / 2^64, irrelevant here.
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

  // Number of failures before the first success at rate p, i.e. the skip
  // length in geometric edge sampling. p must lie in (0,1).
  std::uint64_t geometric_skip(double p) {
    double u = uniform01();
    double g = std::floor(std::log1p(-u) / std::log1p(-p));
    return g < 0 ? 0 : static_cast<std::uint64_t>(g);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pzf

#endif  // PZF_RNG_HPP
