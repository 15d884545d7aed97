#include "vsseq/optim.hpp"

#include <cmath>

namespace vsseq::nn {

void Sgd::step(const std::vector<TensorPtr>& params) {
    for (const auto& p : params) {
        if (!p->requires_grad || p->grad.size() != p->value.size()) continue;
        for (std::size_t i = 0; i < p->value.size(); ++i) p->value[i] -= lr_ * p->grad[i];
    }
}

void Adam::step(const std::vector<TensorPtr>& params) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (const auto& p : params) {
        if (!p->requires_grad || p->grad.size() != p->value.size()) continue;
        State& s = state_[p.get()];
        if (s.m.size() != p->value.size()) {
            s.m.assign(p->value.size(), 0.0);
            s.v.assign(p->value.size(), 0.0);
        }
        for (std::size_t i = 0; i < p->value.size(); ++i) {
            const double g = p->grad[i];
            s.m[i] = beta1_ * s.m[i] + (1.0 - beta1_) * g;
            s.v[i] = beta2_ * s.v[i] + (1.0 - beta2_) * g * g;
            const double mhat = s.m[i] / bc1;
            const double vhat = s.v[i] / bc2;
            p->value[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
        }
    }
}

}  // namespace vsseq::nn
