#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "permanent/errors.hpp"

namespace permanent::detail {

inline void check_dimension(std::size_t n, std::size_t limit,
                            const char* what) {
  if (n > limit)
    throw DimensionTooLarge(std::string(what) + ": n=" + std::to_string(n) +
                            " exceeds guard " + std::to_string(limit));
}

// Sign vector s in {-1,+1}^n for a bit mask; bit b set means s_b = -1.
inline double sign_of_bit(std::uint64_t mask, std::size_t b) {
  return (mask >> b) & 1u ? -1.0 : 1.0;
}

}  // namespace permanent::detail
