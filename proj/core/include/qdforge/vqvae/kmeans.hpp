#ifndef QDFORGE_VQVAE_KMEANS_HPP
#define QDFORGE_VQVAE_KMEANS_HPP

#include <qdforge/autodiff/tensor.hpp>

#include <cstdint>

namespace qdforge::vqvae {

// Lloyd's algorithm over row-major N x D data. Initial centroids are K
// distinct rows chosen by a seeded shuffle; iterates to an assignment
// fixpoint or `max_sweeps`. Empty clusters keep their previous centroid.
autodiff::Tensor kmeans_cluster(const autodiff::Tensor& data, std::size_t k,
                                std::uint64_t seed, std::size_t max_sweeps = 100);

// Codebook bootstrap: K-Means over `samples` points drawn uniformly from
// [-1,1]^dim. Every returned entry lies in [-1,1]^dim.
autodiff::Tensor init_codebook_kmeans(std::size_t k, std::size_t dim,
                                      std::size_t samples, std::uint64_t seed);

} // namespace qdforge::vqvae

#endif
