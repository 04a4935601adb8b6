#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lncg {

inline constexpr const char* kToolVersion = "lncg 0.1.0";

enum class Group { O, SO };

inline const char* to_string(Group g) { return g == Group::O ? "O" : "SO"; }

inline Group group_from_string(const std::string& s) {
  if (s == "O" || s == "o") return Group::O;
  if (s == "SO" || s == "so") return Group::SO;
  throw std::invalid_argument("unknown group '" + s + "' (expected O or SO)");
}

// Error taxonomy mirrored by the CLI exit codes (1/2/3/4).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConvergenceError : std::runtime_error {
  double residual = 0.0;
  ConvergenceError(const std::string& what, double res)
      : std::runtime_error(what + " (residual " + std::to_string(res) + ")"), residual(res) {}
};
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derive independent stream seeds from a master seed and a tag.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) {
  return splitmix64(master ^ splitmix64(tag));
}

// Deterministic 64-bit generator: xoshiro-free, single mt19937_64 core with a
// fully specified uniform/gaussian layer so that seed + algorithm name pin the
// stream independently of the standard library's distribution internals.
// Algorithm name recorded in output files: "mt19937_64/box-muller".
class Rng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64/box-muller";

  explicit Rng(std::uint64_t seed) : seed_(seed) { engine_seed(seed); }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    // mt19937_64 core.
    return mt_next();
  }

  // Uniform in (0, 1); never returns 0 so logs are safe.
  double uniform01() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53; }

  // Uniform integer in [0, bound) via rejection.
  std::uint64_t uniform_int(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_int: bound must be positive");
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % bound;
  }

  // Standard normal via Box-Muller, caching the second variate.
  double gaussian() {
    if (have_cache_) {
      have_cache_ = false;
      return cache_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cache_ = r * std::sin(a);
    have_cache_ = true;
    return r * std::cos(a);
  }

 private:
  // Minimal mt19937_64 (std::mt19937_64 parameters) kept inline so the stream
  // is identical across standard libraries.
  static constexpr int kN = 312;
  std::uint64_t mt_[kN];
  int mti_ = kN + 1;
  std::uint64_t seed_;
  double cache_ = 0.0;
  bool have_cache_ = false;

  void engine_seed(std::uint64_t s) {
    mt_[0] = s;
    for (mti_ = 1; mti_ < kN; mti_++)
      mt_[mti_] = 6364136223846793005ULL * (mt_[mti_ - 1] ^ (mt_[mti_ - 1] >> 62)) + mti_;
  }

  std::uint64_t mt_next() {
    const std::uint64_t kMatrixA = 0xB5026F5AA96619E9ULL;
    const std::uint64_t kUpperMask = 0xFFFFFFFF80000000ULL;
    const std::uint64_t kLowerMask = 0x7FFFFFFFULL;
    if (mti_ >= kN) {
      for (int i = 0; i < kN - 156; i++) {
        const std::uint64_t x = (mt_[i] & kUpperMask) | (mt_[i + 1] & kLowerMask);
        mt_[i] = mt_[i + 156] ^ (x >> 1) ^ ((x & 1) ? kMatrixA : 0);
      }
      for (int i = kN - 156; i < kN - 1; i++) {
        const std::uint64_t x = (mt_[i] & kUpperMask) | (mt_[i + 1] & kLowerMask);
        mt_[i] = mt_[i + (156 - kN)] ^ (x >> 1) ^ ((x & 1) ? kMatrixA : 0);
      }
      const std::uint64_t x = (mt_[kN - 1] & kUpperMask) | (mt_[0] & kLowerMask);
      mt_[kN - 1] = mt_[155] ^ (x >> 1) ^ ((x & 1) ? kMatrixA : 0);
      mti_ = 0;
    }
    std::uint64_t x = mt_[mti_++];
    x ^= (x >> 29) & 0x5555555555555555ULL;
    x ^= (x << 17) & 0x71D67FFFEDA60000ULL;
    x ^= (x << 37) & 0xFFF7EEE000000000ULL;
    x ^= x >> 43;
    return x;
  }
};

}  // namespace lncg
