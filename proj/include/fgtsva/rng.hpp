#pragma once

#include <cmath>
#include <cstdint>

namespace fgtsva {

// Stream ids. Environment streams are fixed small constants; agent streams are
// derived from the policy parameters and always have the top bit set, so the
// two ranges cannot collide.
namespace stream {
inline constexpr std::uint32_t theta_star = 0;
inline constexpr std::uint32_t sigma = 1;
inline constexpr std::uint32_t noise = 2;
inline constexpr std::uint32_t agent_flag = 0x80000000u;
}  // namespace stream

namespace detail {
inline constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}
}  // namespace detail

// Counter-based stream keyed by (seed, run, round, stream). Output i depends
// only on the key and i, never on other streams or the thread schedule, so
// parallel episodes draw identical sequences regardless of execution order.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t run, std::uint64_t round,
            std::uint32_t stream) {
    std::uint64_t k = detail::mix64(seed + detail::golden);
    k = detail::mix64(k ^ (run + detail::golden));
    k = detail::mix64(k ^ (round + detail::golden));
    k = detail::mix64(k ^ (static_cast<std::uint64_t>(stream) + detail::golden));
    key_ = k;
  }

  std::uint64_t next_u64() { return detail::mix64(key_ + detail::golden * ++counter_); }

  // Uniform on [0, 1), 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; the second draw of each pair is cached.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - next_double();  // (0, 1], keeps log finite
    double u2 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fgtsva
