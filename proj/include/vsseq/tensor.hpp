#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace vsseq::nn {

class Tensor;
using TensorPtr = std::shared_ptr<Tensor>;

// Dense float64 tensor node in a dynamically built reverse-mode graph.
// Leaf tensors (parameters, inputs) have no backward_fn; op results carry
// a closure that scatters this node's grad into its parents.
class Tensor {
public:
    std::vector<std::size_t> shape;
    std::vector<double> value;
    std::vector<double> grad;
    bool requires_grad = false;
    std::string name;

    std::vector<TensorPtr> parents;
    std::function<void(Tensor&)> backward_fn;

    static TensorPtr zeros(std::vector<std::size_t> shape, bool requires_grad = false);
    static TensorPtr from_values(std::vector<std::size_t> shape, std::vector<double> values,
                                 bool requires_grad = false);

    std::size_t size() const { return value.size(); }
    bool is_scalar() const { return value.size() == 1; }

    // Allocates a zero grad buffer if absent.
    void ensure_grad();
    void clear_grad() { grad.clear(); }
};

// Reverse-mode sweep from a scalar loss. Seeds d(loss)/d(loss) = 1 and
// visits the graph in reverse topological order.
void backward(const TensorPtr& loss);

void zero_grad(const std::vector<TensorPtr>& params);

std::size_t shape_product(const std::vector<std::size_t>& shape);

}  // namespace vsseq::nn
