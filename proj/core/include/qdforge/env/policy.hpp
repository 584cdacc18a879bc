#ifndef QDFORGE_ENV_POLICY_HPP
#define QDFORGE_ENV_POLICY_HPP

#include <qdforge/autodiff/engine.hpp>

#include <optional>
#include <span>
#include <vector>

namespace qdforge::env {

// Feed-forward policy evaluated straight from a flat genome. Layout per
// layer: row-major weights (in x out) then bias. Evaluation is pure.
struct PolicySpec {
    std::vector<std::size_t> sizes;
    std::vector<std::optional<autodiff::Activation>> activations; // one per layer, nullopt = linear

    std::size_t param_count() const;
    std::size_t input_dim() const { return sizes.front(); }
    std::size_t output_dim() const { return sizes.back(); }
    void forward(std::span<const double> params, std::span<const double> input, std::span<double> output) const;
};

} // namespace qdforge::env

#endif
