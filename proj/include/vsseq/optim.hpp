#pragma once

#include <unordered_map>
#include <vector>

#include "vsseq/tensor.hpp"

namespace vsseq::nn {

// Plain SGD. Tensors without a grad buffer (frozen or unused) are skipped.
class Sgd {
public:
    explicit Sgd(double lr) : lr_(lr) {}
    void step(const std::vector<TensorPtr>& params);

private:
    double lr_;
};

class Adam {
public:
    explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}
    void step(const std::vector<TensorPtr>& params);

private:
    struct State {
        std::vector<double> m;
        std::vector<double> v;
    };
    double lr_, beta1_, beta2_, eps_;
    std::size_t t_ = 0;
    std::unordered_map<Tensor*, State> state_;
};

}  // namespace vsseq::nn
