#ifndef QDFORGE_METRICS_METRICS_HPP
#define QDFORGE_METRICS_METRICS_HPP

#include <qdforge/metrics/ground_truth.hpp>
#include <qdforge/qd/types.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace qdforge::metrics {

using Members = std::span<const qd::Individual* const>;

struct MetricsRecord {
    std::int64_t iteration = 0;
    double coverage = 0.0;
    double pqd = 0.0;
    double edr = 0.0;
    double cds = 0.0;
    std::size_t archive_size = 0;
    std::size_t valid_size = 0;
    bool edr_undefined = false; // empty archive; edr reported as 0
};

double coverage(Members members, const GroundTruthGrid& grid);
double pqd_score(Members members, const GroundTruthGrid& grid);
// occupied bins / valid archive size; a single member scores 1.0
double edr(Members members, const GroundTruthGrid& grid, bool* undefined = nullptr);
inline double cds(double coverage_value, double edr_value) { return coverage_value * edr_value; }

MetricsRecord compute_metrics(std::int64_t iteration, Members members, const GroundTruthGrid& grid);

// 2-D elite-fitness image over a bins x bins grid; values are min-max
// normalized over occupied cells (all-equal normalizes to 1).
struct EliteGridProjection {
    std::size_t bins = 0;
    std::vector<double> values;  // row-major, NaN-free; see occupied
    std::vector<char> occupied;
};

EliteGridProjection elite_grid_projection(Members members,
                                          std::span<const double> lo, std::span<const double> hi,
                                          std::size_t bins = 8,
                                          std::size_t dim_x = 0, std::size_t dim_y = 1);

} // namespace qdforge::metrics

#endif
