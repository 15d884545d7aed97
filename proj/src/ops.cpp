#include "vsseq/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vsseq::nn {

namespace {

bool any_requires_grad(const std::vector<TensorPtr>& parents) {
    for (const auto& p : parents) {
        if (p->requires_grad) return true;
    }
    return false;
}

TensorPtr make_node(std::vector<std::size_t> shape, std::vector<double> value,
                    std::vector<TensorPtr> parents, std::function<void(Tensor&)> bw) {
    auto out = Tensor::from_values(std::move(shape), std::move(value));
    if (any_requires_grad(parents)) {
        out->requires_grad = true;
        out->parents = std::move(parents);
        out->backward_fn = std::move(bw);
    }
    return out;
}

void check_same_size(const TensorPtr& a, const TensorPtr& b, const char* op) {
    if (a->size() != b->size()) {
        throw std::invalid_argument(std::string(op) + ": size mismatch");
    }
}

}  // namespace

TensorPtr add(const TensorPtr& a, const TensorPtr& b) {
    check_same_size(a, b, "add");
    std::vector<double> v(a->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a->value[i] + b->value[i];
    return make_node(a->shape, std::move(v), {a, b}, [a, b](Tensor& out) {
        if (a->requires_grad) {
            a->ensure_grad();
            for (std::size_t i = 0; i < out.grad.size(); ++i) a->grad[i] += out.grad[i];
        }
        if (b->requires_grad) {
            b->ensure_grad();
            for (std::size_t i = 0; i < out.grad.size(); ++i) b->grad[i] += out.grad[i];
        }
    });
}

TensorPtr mul(const TensorPtr& a, const TensorPtr& b) {
    check_same_size(a, b, "mul");
    std::vector<double> v(a->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a->value[i] * b->value[i];
    return make_node(a->shape, std::move(v), {a, b}, [a, b](Tensor& out) {
        if (a->requires_grad) {
            a->ensure_grad();
            for (std::size_t i = 0; i < out.grad.size(); ++i)
                a->grad[i] += out.grad[i] * b->value[i];
        }
        if (b->requires_grad) {
            b->ensure_grad();
            for (std::size_t i = 0; i < out.grad.size(); ++i)
                b->grad[i] += out.grad[i] * a->value[i];
        }
    });
}

TensorPtr sigmoid(const TensorPtr& x) {
    std::vector<double> v(x->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / (1.0 + std::exp(-x->value[i]));
    auto out = make_node(x->shape, std::move(v), {x}, nullptr);
    if (out->requires_grad) {
        out->backward_fn = [x](Tensor& o) {
            x->ensure_grad();
            for (std::size_t i = 0; i < o.grad.size(); ++i) {
                const double s = o.value[i];
                x->grad[i] += o.grad[i] * s * (1.0 - s);
            }
        };
    }
    return out;
}

TensorPtr tanh_t(const TensorPtr& x) {
    std::vector<double> v(x->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::tanh(x->value[i]);
    auto out = make_node(x->shape, std::move(v), {x}, nullptr);
    if (out->requires_grad) {
        out->backward_fn = [x](Tensor& o) {
            x->ensure_grad();
            for (std::size_t i = 0; i < o.grad.size(); ++i) {
                const double t = o.value[i];
                x->grad[i] += o.grad[i] * (1.0 - t * t);
            }
        };
    }
    return out;
}

TensorPtr relu(const TensorPtr& x) {
    std::vector<double> v(x->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = x->value[i] > 0.0 ? x->value[i] : 0.0;
    return make_node(x->shape, std::move(v), {x}, [x](Tensor& out) {
        x->ensure_grad();
        for (std::size_t i = 0; i < out.grad.size(); ++i) {
            if (x->value[i] > 0.0) x->grad[i] += out.grad[i];
        }
    });
}

TensorPtr matvec(const TensorPtr& w, const TensorPtr& x) {
    if (w->shape.size() != 2 || w->shape[1] != x->size()) {
        throw std::invalid_argument("matvec: shape mismatch");
    }
    const std::size_t rows = w->shape[0];
    const std::size_t cols = w->shape[1];
    std::vector<double> v(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* wr = &w->value[r * cols];
        double s = 0.0;
        for (std::size_t c = 0; c < cols; ++c) s += wr[c] * x->value[c];
        v[r] = s;
    }
    return make_node({rows}, std::move(v), {w, x}, [w, x, rows, cols](Tensor& out) {
        if (w->requires_grad) {
            w->ensure_grad();
            for (std::size_t r = 0; r < rows; ++r) {
                const double g = out.grad[r];
                if (g == 0.0) continue;
                double* wg = &w->grad[r * cols];
                for (std::size_t c = 0; c < cols; ++c) wg[c] += g * x->value[c];
            }
        }
        if (x->requires_grad) {
            x->ensure_grad();
            for (std::size_t r = 0; r < rows; ++r) {
                const double g = out.grad[r];
                if (g == 0.0) continue;
                const double* wr = &w->value[r * cols];
                for (std::size_t c = 0; c < cols; ++c) x->grad[c] += g * wr[c];
            }
        }
    });
}

TensorPtr slice(const TensorPtr& x, std::size_t start, std::size_t len) {
    if (start + len > x->size()) throw std::invalid_argument("slice: out of range");
    std::vector<double> v(x->value.begin() + start, x->value.begin() + start + len);
    return make_node({len}, std::move(v), {x}, [x, start, len](Tensor& out) {
        x->ensure_grad();
        for (std::size_t i = 0; i < len; ++i) x->grad[start + i] += out.grad[i];
    });
}

TensorPtr flatten(const TensorPtr& x) {
    std::vector<double> v = x->value;
    return make_node({x->size()}, std::move(v), {x}, [x](Tensor& out) {
        x->ensure_grad();
        for (std::size_t i = 0; i < out.grad.size(); ++i) x->grad[i] += out.grad[i];
    });
}

TensorPtr conv1d(const TensorPtr& input, const TensorPtr& weight, const TensorPtr& bias,
                 std::size_t stride, std::size_t padding) {
    if (input->shape.size() != 2 || weight->shape.size() != 3) {
        throw std::invalid_argument("conv1d: input must be [C_in x L], weight [C_out x C_in x K]");
    }
    const std::size_t c_in = input->shape[0];
    const std::size_t len = input->shape[1];
    const std::size_t c_out = weight->shape[0];
    const std::size_t kernel = weight->shape[2];
    if (weight->shape[1] != c_in) throw std::invalid_argument("conv1d: channel mismatch");
    if (bias->size() != c_out) throw std::invalid_argument("conv1d: bias size mismatch");
    if (stride == 0) throw std::invalid_argument("conv1d: stride must be positive");
    if (len + 2 * padding < kernel) throw std::invalid_argument("conv1d: kernel wider than input");
    const std::size_t l_out = (len + 2 * padding - kernel) / stride + 1;

    std::vector<double> v(c_out * l_out, 0.0);
    for (std::size_t co = 0; co < c_out; ++co) {
        for (std::size_t lo = 0; lo < l_out; ++lo) {
            const long base = static_cast<long>(lo * stride) - static_cast<long>(padding);
            double s = bias->value[co];
            for (std::size_t ci = 0; ci < c_in; ++ci) {
                const double* wk = &weight->value[(co * c_in + ci) * kernel];
                const double* xc = &input->value[ci * len];
                const std::size_t k0 =
                    base < 0 ? static_cast<std::size_t>(-base) : 0;
                const std::size_t k1 = std::min(kernel, static_cast<std::size_t>(
                                                            std::max(0L, static_cast<long>(len) - base)));
                for (std::size_t k = k0; k < k1; ++k) {
                    s += wk[k] * xc[static_cast<std::size_t>(base) + k];
                }
            }
            v[co * l_out + lo] = s;
        }
    }

    return make_node(
        {c_out, l_out}, std::move(v), {input, weight, bias},
        [input, weight, bias, c_in, len, c_out, kernel, stride, padding, l_out](Tensor& out) {
            if (bias->requires_grad) {
                bias->ensure_grad();
                for (std::size_t co = 0; co < c_out; ++co) {
                    double s = 0.0;
                    for (std::size_t lo = 0; lo < l_out; ++lo) s += out.grad[co * l_out + lo];
                    bias->grad[co] += s;
                }
            }
            const bool gi = input->requires_grad;
            const bool gw = weight->requires_grad;
            if (gi) input->ensure_grad();
            if (gw) weight->ensure_grad();
            if (!gi && !gw) return;
            for (std::size_t co = 0; co < c_out; ++co) {
                for (std::size_t lo = 0; lo < l_out; ++lo) {
                    const double g = out.grad[co * l_out + lo];
                    if (g == 0.0) continue;
                    const long base = static_cast<long>(lo * stride) - static_cast<long>(padding);
                    for (std::size_t ci = 0; ci < c_in; ++ci) {
                        const std::size_t w_off = (co * c_in + ci) * kernel;
                        const std::size_t x_off = ci * len;
                        const std::size_t k0 = base < 0 ? static_cast<std::size_t>(-base) : 0;
                        const std::size_t k1 = std::min(
                            kernel, static_cast<std::size_t>(std::max(0L, static_cast<long>(len) - base)));
                        for (std::size_t k = k0; k < k1; ++k) {
                            const std::size_t xi = x_off + static_cast<std::size_t>(base) + k;
                            if (gw) weight->grad[w_off + k] += g * input->value[xi];
                            if (gi) input->grad[xi] += g * weight->value[w_off + k];
                        }
                    }
                }
            }
        });
}

TensorPtr max_pool1d(const TensorPtr& input, std::size_t width, std::size_t stride) {
    if (input->shape.size() != 2) throw std::invalid_argument("max_pool1d: input must be [C x L]");
    if (width == 0 || stride == 0) throw std::invalid_argument("max_pool1d: zero width or stride");
    const std::size_t ch = input->shape[0];
    const std::size_t len = input->shape[1];
    if (len < width) throw std::invalid_argument("max_pool1d: window wider than input");
    const std::size_t l_out = (len - width) / stride + 1;

    std::vector<double> v(ch * l_out);
    auto argmax = std::make_shared<std::vector<std::size_t>>(ch * l_out);
    for (std::size_t c = 0; c < ch; ++c) {
        const double* xc = &input->value[c * len];
        for (std::size_t lo = 0; lo < l_out; ++lo) {
            std::size_t best = lo * stride;
            for (std::size_t k = 1; k < width; ++k) {
                if (xc[lo * stride + k] > xc[best]) best = lo * stride + k;
            }
            v[c * l_out + lo] = xc[best];
            (*argmax)[c * l_out + lo] = c * len + best;
        }
    }
    return make_node({ch, l_out}, std::move(v), {input}, [input, argmax](Tensor& out) {
        input->ensure_grad();
        for (std::size_t i = 0; i < out.grad.size(); ++i) {
            input->grad[(*argmax)[i]] += out.grad[i];
        }
    });
}

TensorPtr linear(const TensorPtr& w, const TensorPtr& b, const TensorPtr& x) {
    return add(matvec(w, x), b);
}

TensorPtr mse_loss(const TensorPtr& pred, const TensorPtr& target) {
    check_same_size(pred, target, "mse_loss");
    const double n = static_cast<double>(pred->size());
    double s = 0.0;
    for (std::size_t i = 0; i < pred->size(); ++i) {
        const double d = pred->value[i] - target->value[i];
        s += d * d;
    }
    return make_node({1}, {s / n}, {pred, target}, [pred, target, n](Tensor& out) {
        const double g = out.grad[0] * 2.0 / n;
        if (pred->requires_grad) {
            pred->ensure_grad();
            for (std::size_t i = 0; i < pred->size(); ++i)
                pred->grad[i] += g * (pred->value[i] - target->value[i]);
        }
        if (target->requires_grad) {
            target->ensure_grad();
            for (std::size_t i = 0; i < target->size(); ++i)
                target->grad[i] -= g * (pred->value[i] - target->value[i]);
        }
    });
}

LstmState lstm_cell(const TensorPtr& x, const LstmState& state, const TensorPtr& w_ih,
                    const TensorPtr& w_hh, const TensorPtr& b) {
    if (w_ih->shape.size() != 2 || w_hh->shape.size() != 2) {
        throw std::invalid_argument("lstm_cell: weight rank mismatch");
    }
    const std::size_t h4 = w_ih->shape[0];
    if (h4 % 4 != 0 || w_hh->shape[0] != h4 || b->size() != h4) {
        throw std::invalid_argument("lstm_cell: packed gate dimension mismatch");
    }
    const std::size_t h = h4 / 4;
    if (w_ih->shape[1] != x->size() || w_hh->shape[1] != h || state.hidden->size() != h ||
        state.cell->size() != h) {
        throw std::invalid_argument("lstm_cell: input/state dimension mismatch");
    }

    TensorPtr pre = add(add(matvec(w_ih, x), matvec(w_hh, state.hidden)), b);
    TensorPtr gi = sigmoid(slice(pre, 0, h));
    TensorPtr gf = sigmoid(slice(pre, h, h));
    TensorPtr gg = tanh_t(slice(pre, 2 * h, h));
    TensorPtr go = sigmoid(slice(pre, 3 * h, h));

    TensorPtr c_new = add(mul(gf, state.cell), mul(gi, gg));
    TensorPtr h_new = mul(go, tanh_t(c_new));
    return {h_new, c_new};
}

}  // namespace vsseq::nn
