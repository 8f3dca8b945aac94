#pragma once

#include <cstdint>

namespace bnmon {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derive an independent stream key from a parent key and an index.
inline std::uint64_t derive_key(std::uint64_t key, std::uint64_t index) {
  return splitmix64(splitmix64(key) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

// Counter-based generator: output i of stream `key` is a pure function of
// (key, i), so per-case streams are independent of evaluation order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next() { return splitmix64(key_ ^ splitmix64(counter_++)); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace bnmon
