#ifndef QDFORGE_QD_EXPERIENCE_HPP
#define QDFORGE_QD_EXPERIENCE_HPP

#include <cstddef>
#include <deque>
#include <vector>

namespace qdforge::qd {

// Append-only raw-BD buffer with a hard capacity; oldest records are
// evicted first. Insertion order is preserved among retained records.
class ExperienceStore {
public:
    explicit ExperienceStore(std::size_t capacity = 50000, bool dedup = false, double dedup_threshold = 0.9)
        : _capacity(capacity), _dedup(dedup), _dedup_threshold(dedup_threshold)
    {
    }

    void append(std::vector<double> raw)
    {
        if (_capacity == 0)
            return;
        if (_records.size() == _capacity)
            _records.pop_front();
        _records.push_back(std::move(raw));
    }

    std::size_t size() const { return _records.size(); }
    std::size_t capacity() const { return _capacity; }
    bool empty() const { return _records.empty(); }
    const std::vector<double>& record(std::size_t i) const { return _records[i]; }

    bool dedup_enabled() const { return _dedup; }
    double dedup_threshold() const { return _dedup_threshold; }

    // Pointer view in insertion order; invalidated by the next append.
    std::vector<const std::vector<double>*> view() const
    {
        std::vector<const std::vector<double>*> out;
        out.reserve(_records.size());
        for (const auto& r : _records)
            out.push_back(&r);
        return out;
    }

private:
    std::size_t _capacity;
    bool _dedup;
    double _dedup_threshold;
    std::deque<std::vector<double>> _records;
};

} // namespace qdforge::qd

#endif
