#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace herald::fock {

// Highest retained Fock level per mode; a mode holds levels 0..cutoff.
struct Truncation {
  int cutoff = 0;

  int levels() const { return cutoff + 1; }
  bool operator==(const Truncation&) const = default;
};

inline std::int64_t pow_i64(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Row-major multi-index over modes: mode 0 carries the most significant
// base-(cutoff+1) digit.  index = n_0 d^{N-1} + n_1 d^{N-2} + ... + n_{N-1}.
struct BasisIndexer {
  int n_modes = 1;
  int levels = 1;

  BasisIndexer(int n_modes_, Truncation t)
      : n_modes(n_modes_), levels(t.levels()) {
    if (n_modes < 1) throw std::invalid_argument("BasisIndexer: n_modes < 1");
    if (levels < 1) throw std::invalid_argument("BasisIndexer: empty basis");
  }

  std::int64_t dim() const { return pow_i64(levels, n_modes); }

  std::int64_t pack(std::span<const int> digits) const {
    std::int64_t idx = 0;
    for (int m = 0; m < n_modes; ++m) {
      if (digits[m] < 0 || digits[m] >= levels)
        throw std::out_of_range("BasisIndexer::pack: digit out of range");
      idx = idx * levels + digits[m];
    }
    return idx;
  }

  void unpack(std::int64_t idx, std::span<int> digits) const {
    for (int m = n_modes - 1; m >= 0; --m) {
      digits[m] = static_cast<int>(idx % levels);
      idx /= levels;
    }
  }

  std::vector<int> unpack(std::int64_t idx) const {
    std::vector<int> d(n_modes);
    unpack(idx, d);
    return d;
  }

  // Digit of one mode without decoding the rest.
  int digit(std::int64_t idx, int mode) const {
    const std::int64_t stride = pow_i64(levels, n_modes - 1 - mode);
    return static_cast<int>((idx / stride) % levels);
  }
};

}  // namespace herald::fock
