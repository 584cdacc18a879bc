#ifndef QDFORGE_ENV_RASTER_HPP
#define QDFORGE_ENV_RASTER_HPP

#include <qdforge/qd/experience.hpp>

#include <span>
#include <vector>

namespace qdforge::env {

// Intersection-over-union of occupied (non-zero) pixels; two empty rasters
// count as identical.
double raster_iou(std::span<const double> a, std::span<const double> b);

// Greedy dataset balancing: walk records in insertion order and drop any
// whose IoU with an already retained record exceeds the threshold.
// Returns the retained indices.
std::vector<std::size_t> filter_duplicates(const qd::ExperienceStore& store, double overlap_threshold);

std::vector<const std::vector<double>*> training_view(const qd::ExperienceStore& store);

} // namespace qdforge::env

#endif
