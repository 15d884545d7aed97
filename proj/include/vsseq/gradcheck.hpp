#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vsseq/tensor.hpp"

namespace vsseq::nn {

struct GradCheckReport {
    double max_rel_err = 0.0;
    bool pass = false;
    std::size_t elements_checked = 0;
    std::string worst;  // "tensor_name[index]"
};

// Compares reverse-mode gradients of a scalar-valued graph builder against
// central finite differences. Large tensors are subsampled (seeded) down to
// max_per_tensor elements. Relative error uses max(1, |a|, |n|) as scale so
// near-zero gradients degrade to an absolute comparison.
GradCheckReport grad_check(const std::function<TensorPtr()>& f,
                           const std::vector<TensorPtr>& params, double step = 1e-5,
                           double tol = 1e-4, std::uint64_t seed = 0,
                           std::size_t max_per_tensor = 200);

}  // namespace vsseq::nn
