#ifndef QDFORGE_ENV_MOBILE_HPP
#define QDFORGE_ENV_MOBILE_HPP

#include <qdforge/env/env.hpp>
#include <qdforge/env/policy.hpp>

#include <array>
#include <vector>

namespace qdforge::env {

struct Segment {
    double x0, y0, x1, y1; // axis-aligned
};

// Differential-drive world. The raw BD is the final-position disc
// rasterized at full resolution and area-average pooled to
// raster_size x raster_size.
struct MobileWorld {
    enum class Preset { free, l_shape };

    double extent = 600.0;
    std::vector<Segment> walls;
    std::array<double, 3> start{300.0, 300.0, 0.0}; // x, y, heading
    double dt = 0.1;
    double wheel_base = 20.0;
    double v_max = 50.0;
    double robot_radius = 10.0;
    int steps = 400;
    std::size_t raster_size = 16;
    bool normalized_fitness = true; // distances on [0,1]^2 in the fitness sum

    static MobileWorld make(Preset preset, std::size_t raster_size = 16);
    static Preset preset_from_string(const std::string& name);

    bool collides(double x, double y) const; // disc vs walls or world border
};

// Full-resolution binary raster of the robot disc at `pos`; one pixel per
// world unit, row r covers y in [r, r+1).
std::vector<double> full_position_raster(const MobileWorld& world, double x, double y);
// Area-average pooling of the full raster to P x P; computed directly from
// the disc so it matches pooling the full image bit for bit.
std::vector<double> pooled_position_raster(const MobileWorld& world, double x, double y);
std::vector<double> pool_raster(const std::vector<double>& full, std::size_t full_side, std::size_t pooled_side);

struct MobileTrace {
    std::vector<std::array<double, 2>> positions; // one per step
    double fitness = 0.0;
};

class MobileEnv : public Environment {
public:
    explicit MobileEnv(MobileWorld world);

    EvalOutcome evaluate(const qd::Genome& genome) const override;
    MobileTrace simulate(const qd::Genome& genome) const;
    std::size_t genome_size() const override { return _policy.param_count(); }
    std::size_t raw_bd_dim() const override { return _world.raster_size * _world.raster_size; }
    std::size_t ground_truth_dim() const override { return 2; }
    std::string kind() const override { return "mobile"; }

    const MobileWorld& world() const { return _world; }
    const PolicySpec& policy() const { return _policy; }

private:
    MobileWorld _world;
    PolicySpec _policy;
};

} // namespace qdforge::env

#endif
