#ifndef QDFORGE_CONTAINERS_CONTAINER_HPP
#define QDFORGE_CONTAINERS_CONTAINER_HPP

#include <qdforge/autodiff/tensor.hpp>
#include <qdforge/qd/types.hpp>

#include <vector>

namespace qdforge::containers {

enum class InsertKind { inserted, replaced, rejected };

struct InsertResult {
    InsertKind kind = InsertKind::rejected;
    int cell = -1;
};

// Elite archive. Single writer; concurrent readers allowed between writes.
class ArchiveContainer {
public:
    virtual ~ArchiveContainer() = default;

    // Cooperation overwrites unconditionally; otherwise insert iff the slot
    // is free or the candidate is strictly fitter.
    virtual InsertResult insert(qd::Individual ind, bool cooperation) = 0;
    virtual std::size_t size() const = 0;
    virtual std::size_t capacity() const = 0;
    // Stable-order view of current members; invalidated by the next write.
    virtual std::vector<const qd::Individual*> members() const = 0;
    // Drop everything and re-insert `members` in order under competition
    // rules (used after the behavior space grid moved).
    virtual void reassign(std::vector<qd::Individual> members) = 0;
    // Replace the behavior-space centers (grid containers only).
    virtual void install_centers(const autodiff::Tensor& centers) {}
    // Per-batch adaptation hook (container size control).
    virtual void after_batch() {}
};

} // namespace qdforge::containers

#endif
