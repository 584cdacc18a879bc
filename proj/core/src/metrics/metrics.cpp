#include <qdforge/metrics/metrics.hpp>
#include <qdforge/common.hpp>

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace qdforge::metrics {

namespace {
    // per-cell elite fitness over the projection grid
    std::unordered_map<std::size_t, double> project_elites(Members members, const GroundTruthGrid& grid)
    {
        std::unordered_map<std::size_t, double> elites;
        for (const auto* m : members) {
            std::size_t cell = grid.assign(m->ground_truth_bd);
            auto it = elites.find(cell);
            if (it == elites.end() || m->fitness > it->second)
                elites[cell] = m->fitness;
        }
        return elites;
    }
} // namespace

double coverage(Members members, const GroundTruthGrid& grid)
{
    auto elites = project_elites(members, grid);
    return static_cast<double>(elites.size()) / static_cast<double>(grid.cell_count());
}

double pqd_score(Members members, const GroundTruthGrid& grid)
{
    auto elites = project_elites(members, grid);
    double sum = 0.0;
    for (const auto& [cell, fitness] : elites)
        sum += fitness;
    return sum;
}

double edr(Members members, const GroundTruthGrid& grid, bool* undefined)
{
    if (undefined)
        *undefined = members.empty();
    if (members.empty())
        return 0.0;
    auto elites = project_elites(members, grid);
    return static_cast<double>(elites.size()) / static_cast<double>(members.size());
}

MetricsRecord compute_metrics(std::int64_t iteration, Members members, const GroundTruthGrid& grid)
{
    MetricsRecord rec;
    rec.iteration = iteration;
    auto elites = project_elites(members, grid);
    double occupied = static_cast<double>(elites.size());
    rec.coverage = occupied / static_cast<double>(grid.cell_count());
    for (const auto& [cell, fitness] : elites)
        rec.pqd += fitness;
    rec.archive_size = members.size();
    rec.valid_size = members.size();
    if (members.empty()) {
        rec.edr_undefined = true;
        rec.edr = 0.0;
    }
    else {
        rec.edr = occupied / static_cast<double>(members.size());
    }
    rec.cds = cds(rec.coverage, rec.edr);
    return rec;
}

EliteGridProjection elite_grid_projection(Members members,
                                          std::span<const double> lo, std::span<const double> hi,
                                          std::size_t bins, std::size_t dim_x, std::size_t dim_y)
{
    if (lo.size() != 2 || hi.size() != 2)
        throw UsageError("elite grid projection: 2-D bounds required");
    EliteGridProjection proj;
    proj.bins = bins;
    proj.values.assign(bins * bins, 0.0);
    proj.occupied.assign(bins * bins, 0);

    auto bin_of = [&](double v, std::size_t d) {
        double width = (hi[d] - lo[d]) / static_cast<double>(bins);
        long b = static_cast<long>(std::floor((v - lo[d]) / width));
        return static_cast<std::size_t>(std::clamp(b, 0L, static_cast<long>(bins) - 1));
    };

    for (const auto* m : members) {
        if (std::max(dim_x, dim_y) >= m->ground_truth_bd.size())
            throw UsageError("elite grid projection: projection dims exceed descriptor size");
        std::size_t bx = bin_of(m->ground_truth_bd[dim_x], 0);
        std::size_t by = bin_of(m->ground_truth_bd[dim_y], 1);
        std::size_t cell = by * bins + bx;
        if (!proj.occupied[cell] || m->fitness > proj.values[cell]) {
            proj.values[cell] = m->fitness;
            proj.occupied[cell] = 1;
        }
    }

    double mn = 0.0, mx = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < proj.values.size(); i++) {
        if (!proj.occupied[i])
            continue;
        if (!any || proj.values[i] < mn)
            mn = proj.values[i];
        if (!any || proj.values[i] > mx)
            mx = proj.values[i];
        any = true;
    }
    for (std::size_t i = 0; i < proj.values.size(); i++) {
        if (!proj.occupied[i]) {
            proj.values[i] = 0.0;
            continue;
        }
        proj.values[i] = (mx > mn) ? (proj.values[i] - mn) / (mx - mn) : 1.0;
    }
    return proj;
}

} // namespace qdforge::metrics
