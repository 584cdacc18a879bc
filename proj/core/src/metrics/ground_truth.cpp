#include <qdforge/metrics/ground_truth.hpp>
#include <qdforge/common.hpp>
#include <qdforge/vqvae/kmeans.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace qdforge::metrics {

using autodiff::Tensor;

std::size_t GroundTruthGrid::cell_count() const
{
    if (kind == Kind::centroids)
        return centroids.rows();
    std::size_t n = 1;
    for (auto b : bins)
        n *= b;
    return n;
}

std::size_t GroundTruthGrid::assign(std::span<const double> bd) const
{
    if (kind == Kind::centroids) {
        const std::size_t dim = centroids.cols();
        if (bd.size() != dim)
            throw UsageError("ground truth: descriptor axis " + std::to_string(bd.size()) + " does not match centroid axis " + std::to_string(dim));
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < centroids.rows(); i++) {
            double d = 0.0;
            for (std::size_t c = 0; c < dim; c++) {
                double diff = bd[c] - centroids.at(i, c);
                d += diff * diff;
            }
            if (d < best) {
                best = d;
                best_i = i;
            }
        }
        return best_i;
    }

    if (bd.size() != bins.size())
        throw UsageError("ground truth: descriptor axis " + std::to_string(bd.size()) + " does not match grid axis " + std::to_string(bins.size()));
    std::size_t cell = 0;
    for (std::size_t d = 0; d < bins.size(); d++) {
        double width = (hi[d] - lo[d]) / static_cast<double>(bins[d]);
        long b = static_cast<long>(std::floor((bd[d] - lo[d]) / width));
        b = std::clamp(b, 0L, static_cast<long>(bins[d]) - 1);
        cell = cell * bins[d] + static_cast<std::size_t>(b);
    }
    return cell;
}

GroundTruthGrid GroundTruthGrid::uniform(std::vector<double> lo, std::vector<double> hi, std::vector<std::size_t> bins)
{
    if (lo.size() != hi.size() || lo.size() != bins.size() || lo.empty())
        throw ConfigError("ground truth grid: bounds and bins must share one dimensionality");
    GroundTruthGrid g;
    g.kind = Kind::uniform;
    g.lo = std::move(lo);
    g.hi = std::move(hi);
    g.bins = std::move(bins);
    return g;
}

GroundTruthGrid GroundTruthGrid::from_centroids(Tensor centroids)
{
    if (centroids.numel() == 0)
        throw ConfigError("ground truth grid: empty centroid list");
    GroundTruthGrid g;
    g.kind = Kind::centroids;
    g.centroids = std::move(centroids);
    return g;
}

GroundTruthGrid build_ground_truth(const env::MobileWorld& world, std::size_t bins_per_dim)
{
    return GroundTruthGrid::uniform({0.0, 0.0}, {world.extent, world.extent}, {bins_per_dim, bins_per_dim});
}

GroundTruthGrid build_ground_truth(const env::GridWorld& world)
{
    std::size_t n = world.traversable_tiles();
    Tensor centroids = Tensor::zeros({n, 2});
    std::size_t i = 0;
    for (std::size_t r = 0; r < world.height; r++)
        for (std::size_t c = 0; c < world.width; c++)
            if (!world.is_wall(r, c)) {
                centroids.at(i, 0) = static_cast<double>(c);
                centroids.at(i, 1) = static_cast<double>(r);
                i++;
            }
    return GroundTruthGrid::from_centroids(std::move(centroids));
}

ArmGroundTruth build_ground_truth(const env::ArmChain& chain, const ArmGroundTruthOptions& opts)
{
    const std::size_t dim = env::ArmChain::joint_count;
    auto rng = make_rng(opts.seed, 0x61726d6774ULL);
    std::array<std::uniform_real_distribution<double>, env::ArmChain::joint_count> dists;
    for (std::size_t j = 0; j < dim; j++)
        dists[j] = std::uniform_real_distribution<double>(chain.limits[j][0], chain.limits[j][1]);

    std::vector<double> accepted;
    std::size_t found = 0;
    std::array<double, dim> q{};
    for (std::size_t draw = 0; draw < opts.sample_budget && found < opts.target_samples; draw++) {
        for (std::size_t j = 0; j < dim; j++)
            q[j] = dists[j](rng);
        auto tip = env::forward_kinematics(chain, q);
        double dx = tip[0] - chain.goal[0], dy = tip[1] - chain.goal[1], dz = tip[2] - chain.goal[2];
        if (dx * dx + dy * dy + dz * dz <= opts.goal_eps * opts.goal_eps) {
            accepted.insert(accepted.end(), q.begin(), q.end());
            found++;
        }
    }
    if (found < opts.k)
        throw ConfigError("arm ground truth: only " + std::to_string(found) + " goal-reaching poses found for k=" + std::to_string(opts.k) + "; increase goal_eps or the sample budget");

    ArmGroundTruth result;
    result.accepted = Tensor({found, dim}, std::move(accepted));
    result.grid = GroundTruthGrid::from_centroids(vqvae::kmeans_cluster(result.accepted, opts.k, opts.seed, 50));
    return result;
}

} // namespace qdforge::metrics
