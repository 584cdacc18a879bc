#include <qdforge/autodiff/adam.hpp>
#include <qdforge/common.hpp>

#include <cmath>

namespace qdforge::autodiff {

void adam_step(AdamState& state, const std::vector<Tensor*>& params)
{
    if (state.m.empty()) {
        state.m.resize(params.size());
        state.v.resize(params.size());
        for (std::size_t p = 0; p < params.size(); p++) {
            state.m[p].assign(params[p]->data.size(), 0.0);
            state.v[p].assign(params[p]->data.size(), 0.0);
        }
    }
    if (state.m.size() != params.size())
        throw UsageError("adam_step: parameter list size changed");

    state.step_count++;
    double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
    double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));

    for (std::size_t p = 0; p < params.size(); p++) {
        Tensor& t = *params[p];
        if (t.grad.size() != t.data.size())
            throw UsageError("adam_step: parameter " + std::to_string(p) + " has no gradient");
        if (state.m[p].size() != t.data.size())
            throw UsageError("adam_step: parameter " + std::to_string(p) + " changed size");
        auto& m = state.m[p];
        auto& v = state.v[p];
        for (std::size_t i = 0; i < t.data.size(); i++) {
            double g = t.grad[i];
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g;
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g * g;
            double mhat = m[i] / bc1;
            double vhat = v[i] / bc2;
            t.data[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
        }
    }
}

} // namespace qdforge::autodiff
