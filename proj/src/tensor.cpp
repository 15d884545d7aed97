#include "vsseq/tensor.hpp"

#include <stdexcept>
#include <unordered_set>

namespace vsseq::nn {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

TensorPtr Tensor::zeros(std::vector<std::size_t> shape, bool requires_grad) {
    auto t = std::make_shared<Tensor>();
    t->value.assign(shape_product(shape), 0.0);
    t->shape = std::move(shape);
    t->requires_grad = requires_grad;
    return t;
}

TensorPtr Tensor::from_values(std::vector<std::size_t> shape, std::vector<double> values,
                              bool requires_grad) {
    if (shape_product(shape) != values.size()) {
        throw std::invalid_argument("Tensor::from_values: shape/value length mismatch");
    }
    auto t = std::make_shared<Tensor>();
    t->shape = std::move(shape);
    t->value = std::move(values);
    t->requires_grad = requires_grad;
    return t;
}

void Tensor::ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
}

void backward(const TensorPtr& loss) {
    if (!loss->is_scalar()) throw std::invalid_argument("backward: loss must be scalar");

    // Iterative post-order DFS for a reverse topological order.
    std::vector<Tensor*> order;
    std::unordered_set<Tensor*> visited;
    std::vector<std::pair<Tensor*, std::size_t>> stack;
    stack.emplace_back(loss.get(), 0);
    visited.insert(loss.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Tensor* p = node->parents[next++].get();
            if (visited.insert(p).second) stack.emplace_back(p, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    loss->ensure_grad();
    loss->grad[0] = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Tensor* node = *it;
        if (node->backward_fn && !node->grad.empty()) node->backward_fn(*node);
    }
}

void zero_grad(const std::vector<TensorPtr>& params) {
    for (const auto& p : params) p->clear_grad();
}

}  // namespace vsseq::nn
