#ifndef QDFORGE_HARNESS_SUMMARIZE_HPP
#define QDFORGE_HARNESS_SUMMARIZE_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace qdforge::harness {

// Per-iteration quantiles (q_low, median, q_high) across runs for every
// metric column. All runs must share the same iteration grid.
std::string summarize_runs(const std::vector<std::filesystem::path>& run_dirs,
                           double q_low = 0.25, double q_high = 0.75);

// Linear-interpolation quantile on a copy of `values`.
double quantile(std::vector<double> values, double q);

} // namespace qdforge::harness

#endif
