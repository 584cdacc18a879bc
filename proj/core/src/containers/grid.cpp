#include <qdforge/containers/grid.hpp>
#include <qdforge/common.hpp>

#include <limits>

namespace qdforge::containers {

GridContainer::GridContainer(autodiff::Tensor centers) : _centers(std::move(centers))
{
    if (_centers.numel() == 0)
        throw ConfigError("grid container needs at least one center");
    _slots.resize(_centers.rows());
}

int GridContainer::nearest_center(const std::vector<double>& bd) const
{
    const std::size_t dim = _centers.cols();
    if (bd.size() != dim)
        throw UsageError("grid: descriptor axis " + std::to_string(bd.size()) + " does not match center axis " + std::to_string(dim));
    double best = std::numeric_limits<double>::infinity();
    int best_i = 0;
    for (std::size_t i = 0; i < _centers.rows(); i++) {
        double d = 0.0;
        for (std::size_t c = 0; c < dim; c++) {
            double diff = bd[c] - _centers.at(i, c);
            d += diff * diff;
        }
        if (d < best) {
            best = d;
            best_i = static_cast<int>(i);
        }
    }
    return best_i;
}

InsertResult GridContainer::insert(qd::Individual ind, bool cooperation)
{
    int cell = nearest_center(ind.latent_bd);
    ind.cell = cell;
    auto& slot = _slots[static_cast<std::size_t>(cell)];
    if (!slot) {
        slot = std::move(ind);
        _occupied++;
        return {InsertKind::inserted, cell};
    }
    if (cooperation || ind.fitness > slot->fitness) {
        slot = std::move(ind);
        return {InsertKind::replaced, cell};
    }
    return {InsertKind::rejected, cell};
}

std::vector<const qd::Individual*> GridContainer::members() const
{
    std::vector<const qd::Individual*> out;
    out.reserve(_occupied);
    for (const auto& slot : _slots)
        if (slot)
            out.push_back(&*slot);
    return out;
}

void GridContainer::reassign(std::vector<qd::Individual> members)
{
    for (auto& slot : _slots)
        slot.reset();
    _occupied = 0;
    for (auto& m : members)
        insert(std::move(m), false);
}

void GridContainer::install_centers(const autodiff::Tensor& centers)
{
    if (centers.rows() != _centers.rows() || centers.cols() != _centers.cols())
        throw UsageError("grid: replacement centers " + centers.shape_str() + " do not match " + _centers.shape_str());
    _centers = centers;
}

GridContainer hardcoded_grid(const HardcodedGridSpec& spec)
{
    using autodiff::Tensor;
    if (spec.centroids.numel() > 0)
        return GridContainer(spec.centroids);

    if (spec.lo.size() != spec.hi.size() || spec.lo.size() != spec.bins.size() || spec.lo.empty())
        throw ConfigError("hardcoded grid: bounds and bins must share one dimensionality");
    std::size_t cells = 1;
    for (std::size_t d = 0; d < spec.bins.size(); d++) {
        if (spec.bins[d] == 0)
            throw ConfigError("hardcoded grid: bins must be positive");
        if (!(spec.lo[d] < spec.hi[d]))
            throw ConfigError("hardcoded grid: empty bounds on dimension " + std::to_string(d));
        cells *= spec.bins[d];
        if (cells > spec.max_cells)
            throw ConfigError("hardcoded grid: cell count exceeds limit " + std::to_string(spec.max_cells));
    }

    const std::size_t dims = spec.bins.size();
    Tensor centers = Tensor::zeros({cells, dims});
    std::vector<std::size_t> idx(dims, 0);
    for (std::size_t c = 0; c < cells; c++) {
        for (std::size_t d = 0; d < dims; d++) {
            double width = (spec.hi[d] - spec.lo[d]) / static_cast<double>(spec.bins[d]);
            centers.at(c, d) = spec.lo[d] + (static_cast<double>(idx[d]) + 0.5) * width;
        }
        // row-major advance, last dimension fastest
        for (std::size_t d = dims; d-- > 0;) {
            if (++idx[d] < spec.bins[d])
                break;
            idx[d] = 0;
        }
    }
    return GridContainer(std::move(centers));
}

} // namespace qdforge::containers
