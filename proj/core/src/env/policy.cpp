#include <qdforge/env/policy.hpp>
#include <qdforge/common.hpp>

namespace qdforge::env {

std::size_t PolicySpec::param_count() const
{
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); l++)
        n += sizes[l] * sizes[l + 1] + sizes[l + 1];
    return n;
}

void PolicySpec::forward(std::span<const double> params, std::span<const double> input, std::span<double> output) const
{
    if (params.size() != param_count())
        throw UsageError("policy: genome length " + std::to_string(params.size()) + " does not match " + std::to_string(param_count()));
    if (input.size() != sizes.front() || output.size() != sizes.back())
        throw UsageError("policy: input/output size mismatch");
    if (activations.size() != sizes.size() - 1)
        throw UsageError("policy: one activation per layer required");

    std::vector<double> cur(input.begin(), input.end());
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); l++) {
        std::size_t in = sizes[l], out = sizes[l + 1];
        std::vector<double> next(out);
        autodiff::kernels::affine(cur.data(), 1, in, params.data() + off, out, params.data() + off + in * out, next.data());
        off += in * out + out;
        if (activations[l]) {
            if (*activations[l] == autodiff::Activation::softmax)
                autodiff::kernels::softmax_rows(next.data(), 1, out, next.data());
            else
                autodiff::kernels::activation_forward(*activations[l], next.data(), out, next.data());
        }
        cur = std::move(next);
    }
    std::copy(cur.begin(), cur.end(), output.begin());
}

} // namespace qdforge::env
