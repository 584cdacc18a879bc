#ifndef QDFORGE_CONTAINERS_UNSTRUCTURED_HPP
#define QDFORGE_CONTAINERS_UNSTRUCTURED_HPP

#include <qdforge/containers/container.hpp>

#include <vector>

namespace qdforge::containers {

struct UnstructuredParams {
    double d_init = 1e-5;
    double d_min = 1e-5;
    double d_max = 1.0;
    double k_csc = 5e-4;
    std::size_t target_size = 0;
    std::size_t max_size = 0; // hard cap; 0 -> 2 * target_size
};

// Distance-thresholded archive with container size control. A candidate is
// added when its nearest member is farther than d_current, otherwise it
// competes with that nearest member only.
class UnstructuredArchive : public ArchiveContainer {
public:
    explicit UnstructuredArchive(UnstructuredParams params);

    InsertResult insert(qd::Individual ind, bool cooperation) override;
    std::size_t size() const override { return _members.size(); }
    std::size_t capacity() const override { return _params.max_size; }
    std::vector<const qd::Individual*> members() const override;
    void reassign(std::vector<qd::Individual> members) override;
    void after_batch() override { csc_adapt(); }

    // Multiplicative proportional control toward target_size, clamped to
    // [d_min, d_max]. Returns the new threshold.
    double csc_adapt();
    double current_distance() const { return _d_current; }
    const UnstructuredParams& params() const { return _params; }

private:
    UnstructuredParams _params;
    double _d_current;
    std::vector<qd::Individual> _members;

    int _nearest_member(const std::vector<double>& bd, double& dist) const;
    void _evict_most_redundant();
};

} // namespace qdforge::containers

#endif
