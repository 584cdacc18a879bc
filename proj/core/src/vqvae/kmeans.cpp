#include <qdforge/vqvae/kmeans.hpp>
#include <qdforge/common.hpp>

#include <Eigen/Core>

#include <algorithm>
#include <limits>
#include <numeric>

namespace qdforge::vqvae {

using autodiff::Tensor;

Tensor kmeans_cluster(const Tensor& data, std::size_t k, std::uint64_t seed, std::size_t max_sweeps)
{
    const std::size_t n = data.rows();
    const std::size_t dim = data.cols();
    if (k == 0)
        throw ConfigError("kmeans: k must be positive");
    if (n < k)
        throw ConfigError("kmeans: " + std::to_string(n) + " samples for k=" + std::to_string(k));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto rng = make_rng(seed, 0x6b6d65616e73ULL);
    std::shuffle(order.begin(), order.end(), rng);

    Tensor centroids = Tensor::zeros({k, dim});
    for (std::size_t c = 0; c < k; c++)
        for (std::size_t d = 0; d < dim; d++)
            centroids.at(c, d) = data.at(order[c], d);

    using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const Mat> dm(data.data.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));

    std::vector<int> assign(n, -1);
    std::vector<int> prev(n, -2);
    std::vector<std::size_t> counts(k, 0);

    for (std::size_t sweep = 0; sweep < max_sweeps && assign != prev; sweep++) {
        prev = assign;
        Eigen::Map<const Mat> cm(centroids.data.data(), static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(dim));
        Mat cross = dm * cm.transpose(); // n x k
        Eigen::VectorXd cnorm = cm.rowwise().squaredNorm();
        for (std::size_t i = 0; i < n; i++) {
            double best = std::numeric_limits<double>::infinity();
            int best_c = 0;
            for (std::size_t c = 0; c < k; c++) {
                double d = cnorm(static_cast<Eigen::Index>(c)) - 2.0 * cross(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
                if (d < best) {
                    best = d;
                    best_c = static_cast<int>(c);
                }
            }
            assign[i] = best_c;
        }
        if (assign == prev)
            break;

        std::fill(counts.begin(), counts.end(), std::size_t{0});
        Tensor sums = Tensor::zeros({k, dim});
        for (std::size_t i = 0; i < n; i++) {
            counts[static_cast<std::size_t>(assign[i])]++;
            for (std::size_t d = 0; d < dim; d++)
                sums.at(static_cast<std::size_t>(assign[i]), d) += data.at(i, d);
        }
        for (std::size_t c = 0; c < k; c++) {
            if (counts[c] == 0)
                continue; // keep previous centroid
            for (std::size_t d = 0; d < dim; d++)
                centroids.at(c, d) = sums.at(c, d) / static_cast<double>(counts[c]);
        }
    }
    return centroids;
}

Tensor init_codebook_kmeans(std::size_t k, std::size_t dim, std::size_t samples, std::uint64_t seed)
{
    if (samples < k)
        throw ConfigError("init_codebook_kmeans: " + std::to_string(samples) + " samples for k=" + std::to_string(k));
    Tensor data = Tensor::zeros({samples, dim});
    auto rng = make_rng(seed, 0x636f6465626f6fULL);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (auto& v : data.data)
        v = unit(rng);
    return kmeans_cluster(data, k, seed);
}

} // namespace qdforge::vqvae
