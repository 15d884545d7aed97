#include "vsseq/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "vsseq/rng.hpp"

namespace vsseq::nn {

GradCheckReport grad_check(const std::function<TensorPtr()>& f,
                           const std::vector<TensorPtr>& params, double step, double tol,
                           std::uint64_t seed, std::size_t max_per_tensor) {
    zero_grad(params);
    TensorPtr loss = f();
    backward(loss);

    std::vector<std::vector<double>> analytic;
    analytic.reserve(params.size());
    for (const auto& p : params) {
        p->ensure_grad();
        analytic.push_back(p->grad);
    }

    GradCheckReport report;
    Rng rng(seed);
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Tensor& p = *params[pi];
        std::vector<std::size_t> idx(p.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        if (idx.size() > max_per_tensor) {
            rng.shuffle(idx);
            idx.resize(max_per_tensor);
        }
        for (std::size_t i : idx) {
            const double saved = p.value[i];
            p.value[i] = saved + step;
            const double f_plus = f()->value[0];
            p.value[i] = saved - step;
            const double f_minus = f()->value[0];
            p.value[i] = saved;

            const double numeric = (f_plus - f_minus) / (2.0 * step);
            const double a = analytic[pi][i];
            const double scale = std::max({1.0, std::fabs(a), std::fabs(numeric)});
            const double rel = std::fabs(a - numeric) / scale;
            ++report.elements_checked;
            if (rel > report.max_rel_err) {
                report.max_rel_err = rel;
                std::string nm = p.name.empty() ? ("param" + std::to_string(pi)) : p.name;
                report.worst = nm + "[" + std::to_string(i) + "]";
            }
        }
    }
    report.pass = report.max_rel_err <= tol;
    return report;
}

}  // namespace vsseq::nn
