#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rank1/tensor.hpp"

namespace rank1 {

/// i.i.d. standard normal entries from the seeded counter generator.
DenseTensor gen_gaussian(const std::vector<std::size_t>& dims, std::uint64_t seed);

// Deterministic synthetic test tensors; index variables below are 1-based.

/// Entry = sum_j (-1)^(j+1) * j * exp(-i_j).
DenseTensor gen_exp(const std::vector<std::size_t>& dims);

/// Entry = sum_j arcsin((-1)^(i_j) * j / i_j) when i_j >= j for all j,
/// else 0. The guard keeps every arcsin argument inside [-1, 1].
DenseTensor gen_arcsin(const std::vector<std::size_t>& dims);

/// Entry = tan(sum_j (-1)^(j+1) * i_j / j).
DenseTensor gen_tan(const std::vector<std::size_t>& dims);

/// Dispatch by name: gaussian | exp | arcsin | tan. Empty dims picks the
/// generator's default shape (10^3, 30^3, 20^4, 10^5 respectively).
DenseTensor generate(const std::string& name, std::vector<std::size_t> dims, std::uint64_t seed);

std::vector<std::size_t> default_dims(const std::string& name);

}  // namespace rank1
