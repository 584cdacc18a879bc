#include <qdforge/harness/svg.hpp>
#include <qdforge/common.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qdforge::harness {

namespace {
    struct Rgb {
        int r, g, b;
    };

    Rgb parse_hex(const char* hex)
    {
        auto nibble = [](char c) { return c <= '9' ? c - '0' : 10 + (c - 'a'); };
        return {nibble(hex[1]) * 16 + nibble(hex[2]), nibble(hex[3]) * 16 + nibble(hex[4]), nibble(hex[5]) * 16 + nibble(hex[6])};
    }

    std::string to_hex(const Rgb& c)
    {
        char buf[8];
        std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", c.r, c.g, c.b);
        return buf;
    }
} // namespace

std::string colormap_hex(double t)
{
    t = std::clamp(t, 0.0, 1.0);
    Rgb cold = parse_hex(kColdColor);
    Rgb hot = parse_hex(kHotColor);
    auto lerp = [&](int a, int b) { return static_cast<int>(std::lround(a + t * (b - a))); };
    return to_hex({lerp(cold.r, hot.r), lerp(cold.g, hot.g), lerp(cold.b, hot.b)});
}

std::string elite_grid_svg(const metrics::EliteGridProjection& projection, std::size_t cell_px)
{
    const std::size_t n = projection.bins;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << n * cell_px << "\" height=\"" << n * cell_px << "\">\n";
    for (std::size_t row = 0; row < n; row++) {
        for (std::size_t col = 0; col < n; col++) {
            std::size_t cell = row * n + col;
            // row 0 of the projection is the low-y band; draw it at the bottom
            std::size_t y = (n - 1 - row) * cell_px;
            out << "  <rect class=\"cell\" x=\"" << col * cell_px << "\" y=\"" << y << "\" width=\"" << cell_px
                << "\" height=\"" << cell_px << "\" fill=\"";
            if (projection.occupied[cell])
                out << colormap_hex(projection.values[cell]) << "\"";
            else
                out << kEmptyColor << "\" data-empty=\"1\"";
            out << "/>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

std::string decoded_centers_svg(const autodiff::Tensor& decoded, std::size_t side,
                                std::size_t max_centers, std::size_t pixel_px)
{
    if (decoded.cols() != side * side)
        throw UsageError("decoded centers: row size " + std::to_string(decoded.cols()) + " is not " + std::to_string(side) + "^2");
    const std::size_t count = std::min<std::size_t>(decoded.rows(), max_centers);
    const std::size_t per_row = std::min<std::size_t>(count, 16);
    const std::size_t rows = (count + per_row - 1) / per_row;
    const std::size_t tile = side * pixel_px + 2;

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << per_row * tile << "\" height=\"" << rows * tile << "\">\n";
    for (std::size_t k = 0; k < count; k++) {
        std::size_t ox = (k % per_row) * tile;
        std::size_t oy = (k / per_row) * tile;
        out << "  <g class=\"center\" data-index=\"" << k << "\">\n";
        for (std::size_t r = 0; r < side; r++) {
            for (std::size_t c = 0; c < side; c++) {
                double v = std::clamp(decoded.at(k, r * side + c), 0.0, 1.0);
                int gray = static_cast<int>(std::lround(v * 255.0));
                char color[8];
                std::snprintf(color, sizeof(color), "#%02x%02x%02x", gray, gray, gray);
                out << "    <rect x=\"" << ox + c * pixel_px << "\" y=\"" << oy + r * pixel_px << "\" width=\"" << pixel_px
                    << "\" height=\"" << pixel_px << "\" fill=\"" << color << "\"/>\n";
            }
        }
        out << "  </g>\n";
    }
    out << "</svg>\n";
    return out.str();
}

void write_svg(const std::filesystem::path& path, const std::string& svg)
{
    std::ofstream out(path);
    if (!out)
        throw UsageError("cannot write svg '" + path.string() + "'");
    out << svg;
}

} // namespace qdforge::harness
