#pragma once

#include <string>

#include "rank1/tensor.hpp"

namespace rank1 {

// Binary tensor format ".dt1": magic "DTEN1\0", u8 order d (d >= 2), d
// little-endian u64 dims, then prod(dims) little-endian IEEE-754 f64 values
// in generalized column-major order (first index fastest). The loader
// validates the payload length exactly.

void write_dt1(const std::string& path, const DenseTensor& a);
DenseTensor read_dt1(const std::string& path);

/// Saves a matrix as an order-2 .dt1 tensor (debugging aid).
void write_dt1(const std::string& path, const Matrix& m);

}  // namespace rank1
