#ifndef QDFORGE_AUTODIFF_ADAM_HPP
#define QDFORGE_AUTODIFF_ADAM_HPP

#include <qdforge/autodiff/tensor.hpp>

#include <cstdint>
#include <vector>

namespace qdforge::autodiff {

// Adam with bias correction. Moment buffers are laid out to match the
// parameter list given on the first step and stay fixed afterwards.
struct AdamState {
    double lr = 7e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::int64_t step_count = 0;

    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
};

// One update over `params`; every tensor must carry a populated grad buffer.
void adam_step(AdamState& state, const std::vector<Tensor*>& params);

} // namespace qdforge::autodiff

#endif
