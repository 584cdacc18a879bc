#include <qdforge/containers/unstructured.hpp>
#include <qdforge/common.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace qdforge::containers {

namespace {
    double euclidean(const std::vector<double>& a, const std::vector<double>& b)
    {
        double d = 0.0;
        for (std::size_t i = 0; i < a.size(); i++) {
            double diff = a[i] - b[i];
            d += diff * diff;
        }
        return std::sqrt(d);
    }
} // namespace

UnstructuredArchive::UnstructuredArchive(UnstructuredParams params) : _params(params), _d_current(params.d_init)
{
    if (_params.target_size == 0)
        throw ConfigError("unstructured archive: target_size must be positive");
    if (_params.max_size == 0)
        _params.max_size = 2 * _params.target_size;
    if (!(_params.d_min <= _params.d_init && _params.d_init <= _params.d_max))
        throw ConfigError("unstructured archive: d_init outside [d_min, d_max]");
}

int UnstructuredArchive::_nearest_member(const std::vector<double>& bd, double& dist) const
{
    dist = std::numeric_limits<double>::infinity();
    int best = -1;
    for (std::size_t i = 0; i < _members.size(); i++) {
        double d = euclidean(bd, _members[i].latent_bd);
        if (d < dist) {
            dist = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

void UnstructuredArchive::_evict_most_redundant()
{
    // smallest nearest-neighbor distance = most redundant member
    std::size_t victim = 0;
    double victim_nn = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < _members.size(); i++) {
        double nn = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < _members.size(); j++) {
            if (i == j)
                continue;
            nn = std::min(nn, euclidean(_members[i].latent_bd, _members[j].latent_bd));
        }
        if (nn < victim_nn) {
            victim_nn = nn;
            victim = i;
        }
    }
    _members.erase(_members.begin() + static_cast<std::ptrdiff_t>(victim));
}

InsertResult UnstructuredArchive::insert(qd::Individual ind, bool cooperation)
{
    if (!ind.latent_bd.empty() && !_members.empty() && ind.latent_bd.size() != _members.front().latent_bd.size())
        throw UsageError("unstructured archive: descriptor dimensionality changed");
    ind.cell = -1;

    double dist = 0.0;
    int nearest = _nearest_member(ind.latent_bd, dist);
    if (nearest < 0 || dist > _d_current) {
        _members.push_back(std::move(ind));
        if (_members.size() > _params.max_size)
            _evict_most_redundant();
        return {InsertKind::inserted, -1};
    }
    if (cooperation || ind.fitness > _members[static_cast<std::size_t>(nearest)].fitness) {
        _members[static_cast<std::size_t>(nearest)] = std::move(ind);
        return {InsertKind::replaced, nearest};
    }
    return {InsertKind::rejected, nearest};
}

std::vector<const qd::Individual*> UnstructuredArchive::members() const
{
    std::vector<const qd::Individual*> out;
    out.reserve(_members.size());
    for (const auto& m : _members)
        out.push_back(&m);
    return out;
}

void UnstructuredArchive::reassign(std::vector<qd::Individual> members)
{
    _members.clear();
    for (auto& m : members)
        insert(std::move(m), false);
}

double UnstructuredArchive::csc_adapt()
{
    double error = (static_cast<double>(_members.size()) - static_cast<double>(_params.target_size)) / static_cast<double>(_params.target_size);
    _d_current = std::clamp(_d_current * (1.0 + _params.k_csc * error), _params.d_min, _params.d_max);
    return _d_current;
}

} // namespace qdforge::containers
