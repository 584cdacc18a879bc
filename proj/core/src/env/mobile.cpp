#include <qdforge/env/mobile.hpp>
#include <qdforge/common.hpp>

#include <algorithm>
#include <cmath>

namespace qdforge::env {

namespace {
    double segment_distance(const Segment& s, double x, double y)
    {
        double vx = s.x1 - s.x0, vy = s.y1 - s.y0;
        double wx = x - s.x0, wy = y - s.y0;
        double len2 = vx * vx + vy * vy;
        double t = len2 > 0.0 ? std::clamp((wx * vx + wy * vy) / len2, 0.0, 1.0) : 0.0;
        double dx = wx - t * vx, dy = wy - t * vy;
        return std::sqrt(dx * dx + dy * dy);
    }

    std::size_t pool_band(std::size_t pixel, std::size_t full, std::size_t pooled)
    {
        return pixel * pooled / full;
    }

    PolicySpec mobile_policy()
    {
        using autodiff::Activation;
        PolicySpec p;
        p.sizes = {4, 16, 2};
        p.activations = {Activation::relu, Activation::tanh};
        return p;
    }
} // namespace

MobileWorld::Preset MobileWorld::preset_from_string(const std::string& name)
{
    if (name == "free")
        return Preset::free;
    if (name == "l_shape")
        return Preset::l_shape;
    throw ConfigError("unknown mobile wall preset '" + name + "'");
}

MobileWorld MobileWorld::make(Preset preset, std::size_t raster_size)
{
    MobileWorld w;
    w.raster_size = raster_size;
    if (preset == Preset::l_shape) {
        // free space is the L formed by blocking the [200,600]^2 quadrant
        w.walls = {{200.0, 200.0, 200.0, 600.0}, {200.0, 200.0, 600.0, 200.0}};
        w.start = {100.0, 100.0, 0.0};
    }
    return w;
}

bool MobileWorld::collides(double x, double y) const
{
    if (x < robot_radius || y < robot_radius || x > extent - robot_radius || y > extent - robot_radius)
        return true;
    for (const auto& s : walls)
        if (segment_distance(s, x, y) < robot_radius)
            return true;
    return false;
}

std::vector<double> full_position_raster(const MobileWorld& world, double x, double y)
{
    const std::size_t side = static_cast<std::size_t>(world.extent);
    std::vector<double> img(side * side, 0.0);
    double r2 = world.robot_radius * world.robot_radius;
    for (std::size_t row = 0; row < side; row++) {
        for (std::size_t col = 0; col < side; col++) {
            double dx = (static_cast<double>(col) + 0.5) - x;
            double dy = (static_cast<double>(row) + 0.5) - y;
            if (dx * dx + dy * dy <= r2)
                img[row * side + col] = 1.0;
        }
    }
    return img;
}

std::vector<double> pool_raster(const std::vector<double>& full, std::size_t full_side, std::size_t pooled_side)
{
    if (full.size() != full_side * full_side)
        throw UsageError("pool_raster: image size mismatch");
    std::vector<double> sums(pooled_side * pooled_side, 0.0);
    std::vector<std::size_t> counts(pooled_side * pooled_side, 0);
    for (std::size_t row = 0; row < full_side; row++) {
        std::size_t pr = pool_band(row, full_side, pooled_side);
        for (std::size_t col = 0; col < full_side; col++) {
            std::size_t pc = pool_band(col, full_side, pooled_side);
            sums[pr * pooled_side + pc] += full[row * full_side + col];
            counts[pr * pooled_side + pc]++;
        }
    }
    for (std::size_t i = 0; i < sums.size(); i++)
        sums[i] /= static_cast<double>(counts[i]);
    return sums;
}

std::vector<double> pooled_position_raster(const MobileWorld& world, double x, double y)
{
    const std::size_t side = static_cast<std::size_t>(world.extent);
    const std::size_t p = world.raster_size;
    std::vector<double> hits(p * p, 0.0);

    // hit counts, visiting only the disc's bounding box
    double r = world.robot_radius;
    double r2 = r * r;
    auto clamp_pix = [&](double v) { return std::clamp(static_cast<long>(std::floor(v)), 0L, static_cast<long>(side) - 1); };
    long row0 = clamp_pix(y - r - 1.0), row1 = clamp_pix(y + r + 1.0);
    long col0 = clamp_pix(x - r - 1.0), col1 = clamp_pix(x + r + 1.0);
    for (long row = row0; row <= row1; row++) {
        for (long col = col0; col <= col1; col++) {
            double dx = (static_cast<double>(col) + 0.5) - x;
            double dy = (static_cast<double>(row) + 0.5) - y;
            if (dx * dx + dy * dy <= r2)
                hits[pool_band(static_cast<std::size_t>(row), side, p) * p + pool_band(static_cast<std::size_t>(col), side, p)] += 1.0;
        }
    }

    // per-band pixel counts; identical to pooling the full binary image
    std::vector<std::size_t> band(p, 0);
    for (std::size_t pix = 0; pix < side; pix++)
        band[pool_band(pix, side, p)]++;
    for (std::size_t i = 0; i < p; i++)
        for (std::size_t j = 0; j < p; j++)
            hits[i * p + j] /= static_cast<double>(band[i] * band[j]);
    return hits;
}

MobileEnv::MobileEnv(MobileWorld world) : _world(std::move(world)), _policy(mobile_policy())
{
    if (_world.collides(_world.start[0], _world.start[1]))
        throw ConfigError("mobile: start pose collides with the world");
}

MobileTrace MobileEnv::simulate(const qd::Genome& genome) const
{
    MobileTrace trace;
    trace.positions.reserve(static_cast<std::size_t>(_world.steps));

    double x = _world.start[0], y = _world.start[1], heading = _world.start[2];
    std::array<double, 4> state{};
    std::array<double, 2> wheels{};

    for (int step = 0; step < _world.steps; step++) {
        state = {x / _world.extent, y / _world.extent, std::cos(heading), std::sin(heading)};
        _policy.forward(genome.params, state, wheels);
        double v = (wheels[0] + wheels[1]) * _world.v_max / 2.0;
        double omega = (wheels[1] - wheels[0]) * _world.v_max / _world.wheel_base;

        double dx = v * std::cos(heading) * _world.dt;
        double dy = v * std::sin(heading) * _world.dt;
        heading += omega * _world.dt;

        // axis-separated projection with sub-stepping against tunneling
        int subs = std::max(1, static_cast<int>(std::ceil(std::hypot(dx, dy) / _world.robot_radius)));
        for (int s = 0; s < subs; s++) {
            double nx = x + dx / subs;
            if (!_world.collides(nx, y))
                x = nx;
            double ny = y + dy / subs;
            if (!_world.collides(x, ny))
                y = ny;
        }
        trace.positions.push_back({x, y});
    }

    double scale = _world.normalized_fitness ? _world.extent : 1.0;
    const auto& last = trace.positions.back();
    double fitness = 0.0;
    for (const auto& p : trace.positions) {
        double dx = (p[0] - last[0]) / scale;
        double dy = (p[1] - last[1]) / scale;
        fitness += std::exp(-std::sqrt(dx * dx + dy * dy));
    }
    trace.fitness = fitness;
    return trace;
}

EvalOutcome MobileEnv::evaluate(const qd::Genome& genome) const
{
    MobileTrace trace = simulate(genome);
    const auto& last = trace.positions.back();
    EvalOutcome out;
    out.fitness = trace.fitness;
    out.raw_bd = pooled_position_raster(_world, last[0], last[1]);
    out.ground_truth_bd = {last[0], last[1]};
    return out;
}

} // namespace qdforge::env
