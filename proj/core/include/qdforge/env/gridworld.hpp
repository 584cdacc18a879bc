#ifndef QDFORGE_ENV_GRIDWORLD_HPP
#define QDFORGE_ENV_GRIDWORLD_HPP

#include <qdforge/env/env.hpp>
#include <qdforge/env/policy.hpp>

#include <string>
#include <vector>

namespace qdforge::env {

// Key-door exploration map parsed from ASCII text: '#' wall, '.' empty,
// 'a'-'c' keys, 'A'-'C' matching doors, '@' agent start.
struct GridWorld {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<char> tiles; // row-major, row 0 at the top
    std::size_t start_row = 0;
    std::size_t start_col = 0;
    std::size_t key_slots = 0; // one-hot width of the collected-keys vector
    int steps = 200;
    int fov = 3; // Chebyshev radius

    static GridWorld from_text(const std::string& text);
    static GridWorld from_file(const std::string& path);
    static GridWorld default_map();

    char tile(std::size_t row, std::size_t col) const { return tiles[row * width + col]; }
    bool is_wall(std::size_t row, std::size_t col) const { return tile(row, col) == '#'; }
    std::size_t traversable_tiles() const;
    std::size_t max_score() const; // 10 per key + 20 per door
};

class GridworldEnv : public Environment {
public:
    explicit GridworldEnv(GridWorld world);

    EvalOutcome evaluate(const qd::Genome& genome) const override;
    std::size_t genome_size() const override { return _policy.param_count(); }
    std::size_t raw_bd_dim() const override { return _world.width * _world.height; }
    std::size_t ground_truth_dim() const override { return 2; }
    std::string kind() const override { return "gridworld"; }

    const GridWorld& world() const { return _world; }
    const PolicySpec& policy() const { return _policy; }

private:
    GridWorld _world;
    PolicySpec _policy;
};

} // namespace qdforge::env

#endif
