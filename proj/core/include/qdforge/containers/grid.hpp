#ifndef QDFORGE_CONTAINERS_GRID_HPP
#define QDFORGE_CONTAINERS_GRID_HPP

#include <qdforge/containers/container.hpp>

#include <optional>
#include <vector>

namespace qdforge::containers {

// Structured archive over K centers (a learned codebook or a hand-coded
// grid). Slot i holds an individual whose nearest center is i.
class GridContainer : public ArchiveContainer {
public:
    explicit GridContainer(autodiff::Tensor centers);

    InsertResult insert(qd::Individual ind, bool cooperation) override;
    std::size_t size() const override { return _occupied; }
    std::size_t capacity() const override { return _centers.rows(); }
    std::vector<const qd::Individual*> members() const override;
    void reassign(std::vector<qd::Individual> members) override;
    void install_centers(const autodiff::Tensor& centers) override;

    const autodiff::Tensor& centers() const { return _centers; }
    const std::optional<qd::Individual>& slot(std::size_t i) const { return _slots[i]; }
    int nearest_center(const std::vector<double>& bd) const;

private:
    autodiff::Tensor _centers;
    std::vector<std::optional<qd::Individual>> _slots;
    std::size_t _occupied = 0;
};

// Uniform-grid spec (centers at bin midpoints) or an explicit centroid
// list, e.g. clustered reachable arm configurations.
struct HardcodedGridSpec {
    std::vector<double> lo;
    std::vector<double> hi;
    std::vector<std::size_t> bins;
    autodiff::Tensor centroids; // used when non-empty
    std::size_t max_cells = 1000000;
};

GridContainer hardcoded_grid(const HardcodedGridSpec& spec);

} // namespace qdforge::containers

#endif
