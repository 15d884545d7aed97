#pragma once

#include <string>
#include <vector>

#include "vsseq/tensor.hpp"

namespace vsseq::nn {

// Binary weight container.
// Layout (all little-endian):
//   magic "VSNN" | version u32 | tensor_count u32
//   per tensor: name_len u32 | name bytes | rank u32 | dims u64[rank] | float64 payload
// Round-trips byte-exactly. Tensor names come from Tensor::name.
inline constexpr std::uint32_t kWeightFormatVersion = 1;

void save_tensors(const std::string& path, const std::vector<TensorPtr>& tensors);
std::vector<TensorPtr> load_tensors(const std::string& path);

}  // namespace vsseq::nn
