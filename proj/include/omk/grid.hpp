#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace omk {

// A contiguous block of the global lattice omega_j = j * spacing.
// Windows on one lattice can be combined without interpolation.
struct FrequencyWindow {
  double spacing = 0.0;
  std::int64_t first = 0;
  std::size_t size = 0;

  std::int64_t index(std::size_t i) const { return first + static_cast<std::int64_t>(i); }
  std::int64_t last() const { return first + static_cast<std::int64_t>(size) - 1; }
  double frequency(std::size_t i) const { return static_cast<double>(index(i)) * spacing; }
  bool contains(std::int64_t j) const { return j >= first && j <= last(); }
  std::size_t offset(std::int64_t j) const { return static_cast<std::size_t>(j - first); }
  double lower() const { return static_cast<double>(first) * spacing; }
  double upper() const { return static_cast<double>(last()) * spacing; }
  double center() const { return 0.5 * (lower() + upper()); }
};

// Output window covering [lo, hi] on the lattice of the given spacing.
FrequencyWindow lattice_window(double spacing, double lo, double hi);

}  // namespace omk
