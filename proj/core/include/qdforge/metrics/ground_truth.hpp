#ifndef QDFORGE_METRICS_GROUND_TRUTH_HPP
#define QDFORGE_METRICS_GROUND_TRUTH_HPP

#include <qdforge/autodiff/tensor.hpp>
#include <qdforge/env/arm.hpp>
#include <qdforge/env/gridworld.hpp>
#include <qdforge/env/mobile.hpp>

#include <cstdint>
#include <span>

namespace qdforge::metrics {

// Hand-coded behavior grid used only for evaluation: a uniform grid over
// known bounds, or an explicit centroid list (nearest-centroid cells).
struct GroundTruthGrid {
    enum class Kind { uniform, centroids };

    Kind kind = Kind::uniform;
    std::vector<double> lo, hi;
    std::vector<std::size_t> bins;
    autodiff::Tensor centroids;

    std::size_t cell_count() const;
    std::size_t assign(std::span<const double> bd) const;

    static GroundTruthGrid uniform(std::vector<double> lo, std::vector<double> hi, std::vector<std::size_t> bins);
    static GroundTruthGrid from_centroids(autodiff::Tensor centroids);
};

GroundTruthGrid build_ground_truth(const env::MobileWorld& world, std::size_t bins_per_dim = 30);
// one cell per traversable tile
GroundTruthGrid build_ground_truth(const env::GridWorld& world);

struct ArmGroundTruthOptions {
    double goal_eps = 0.05;          // FK tip must land within eps of the goal
    std::size_t target_samples = 100000;
    std::size_t sample_budget = 20000000;
    std::size_t k = 400;
    std::uint64_t seed = 17;
};

struct ArmGroundTruth {
    GroundTruthGrid grid;
    autodiff::Tensor accepted; // pose samples the centroids were fit on
};

// Rejection-sample goal-reaching joint configurations within the chain's
// limits, then cluster them into k centroids.
ArmGroundTruth build_ground_truth(const env::ArmChain& chain, const ArmGroundTruthOptions& opts);

} // namespace qdforge::metrics

#endif
