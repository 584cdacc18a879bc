#ifndef QDFORGE_HARNESS_SVG_HPP
#define QDFORGE_HARNESS_SVG_HPP

#include <qdforge/autodiff/tensor.hpp>
#include <qdforge/metrics/metrics.hpp>

#include <filesystem>
#include <string>

namespace qdforge::harness {

// Colormap endpoints (viridis extremes); empty cells render in gray with a
// data-empty marker attribute.
inline constexpr const char* kColdColor = "#440154";
inline constexpr const char* kHotColor = "#fde725";
inline constexpr const char* kEmptyColor = "#d9d9d9";

std::string colormap_hex(double t); // t in [0,1], cold -> hot

std::string elite_grid_svg(const metrics::EliteGridProjection& projection, std::size_t cell_px = 24);
// One grayscale side x side square per decoded codebook entry, laid out as
// a horizontal strip (wrapped every 16 entries).
std::string decoded_centers_svg(const autodiff::Tensor& decoded, std::size_t side,
                                std::size_t max_centers = 64, std::size_t pixel_px = 4);

void write_svg(const std::filesystem::path& path, const std::string& svg);

} // namespace qdforge::harness

#endif
