#include <qdforge/env/gridworld.hpp>
#include <qdforge/common.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace qdforge::env {

namespace {
    constexpr double kEmptyValue = 0.2;
    constexpr double kWallValue = 0.4;
    constexpr double kAgentValue = 1.0;

    bool is_key(char c) { return c >= 'a' && c <= 'c'; }
    bool is_door(char c) { return c >= 'A' && c <= 'C'; }

    double tile_value(char c)
    {
        if (c == '#')
            return kWallValue;
        if (is_key(c))
            return 0.5 + 0.05 * static_cast<double>(c - 'a');
        if (is_door(c))
            return 0.7 + 0.05 * static_cast<double>(c - 'A');
        return kEmptyValue;
    }

    PolicySpec gridworld_policy(std::size_t snapshot_dim, std::size_t key_slots)
    {
        using autodiff::Activation;
        PolicySpec p;
        p.sizes = {snapshot_dim + key_slots, 32, 5};
        p.activations = {Activation::silu, Activation::softmax};
        return p;
    }
} // namespace

GridWorld GridWorld::from_text(const std::string& text)
{
    GridWorld w;
    std::vector<std::string> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!line.empty())
            rows.push_back(line);
    }
    if (rows.empty())
        throw ConfigError("gridworld map: empty map");

    w.height = rows.size();
    w.width = rows.front().size();
    w.tiles.reserve(w.width * w.height);

    bool start_seen = false;
    std::array<bool, 3> keys_present{}, doors_present{};
    for (std::size_t r = 0; r < w.height; r++) {
        if (rows[r].size() != w.width)
            throw ConfigError("gridworld map: row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) + " tiles, expected " + std::to_string(w.width));
        for (std::size_t c = 0; c < w.width; c++) {
            char t = rows[r][c];
            if (t == '@') {
                if (start_seen)
                    throw ConfigError("gridworld map: multiple agent starts");
                start_seen = true;
                w.start_row = r;
                w.start_col = c;
                t = '.';
            }
            else if (is_key(t))
                keys_present[static_cast<std::size_t>(t - 'a')] = true;
            else if (is_door(t))
                doors_present[static_cast<std::size_t>(t - 'A')] = true;
            else if (t != '#' && t != '.')
                throw ConfigError(std::string("gridworld map: unknown tile '") + t + "' at row " + std::to_string(r));
            w.tiles.push_back(t);
        }
    }
    if (!start_seen)
        throw ConfigError("gridworld map: missing '@' start tile");
    for (std::size_t i = 0; i < 3; i++) {
        if (doors_present[i] && !keys_present[i])
            throw ConfigError(std::string("gridworld map: door '") + static_cast<char>('A' + i) + "' has no matching key");
        if (keys_present[i] || doors_present[i])
            w.key_slots = std::max(w.key_slots, i + 1);
    }
    return w;
}

GridWorld GridWorld::from_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("gridworld map: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str());
}

GridWorld GridWorld::default_map()
{
    // four rooms, three key/door pairs, door chain a->A->b->B->c->C
    static const char* kMap = "##################\n"
                              "#.......#........#\n"
                              "#.@.....#........#\n"
                              "#.......#....b...#\n"
                              "#.......A........#\n"
                              "#.......#........#\n"
                              "#....a..#........#\n"
                              "#.......#........#\n"
                              "############B#####\n"
                              "#.......#........#\n"
                              "#.......#........#\n"
                              "#.......#........#\n"
                              "#.......C........#\n"
                              "#.......#....c...#\n"
                              "#.......#........#\n"
                              "#.......#........#\n"
                              "#.......#........#\n"
                              "##################\n";
    return from_text(kMap);
}

std::size_t GridWorld::traversable_tiles() const
{
    return static_cast<std::size_t>(std::count_if(tiles.begin(), tiles.end(), [](char t) { return t != '#'; }));
}

std::size_t GridWorld::max_score() const
{
    std::size_t score = 0;
    for (char t : tiles) {
        if (is_key(t))
            score += 10;
        else if (is_door(t))
            score += 20;
    }
    return score;
}

GridworldEnv::GridworldEnv(GridWorld world)
    : _world(std::move(world)), _policy(gridworld_policy(_world.width * _world.height, _world.key_slots))
{
}

EvalOutcome GridworldEnv::evaluate(const qd::Genome& genome) const
{
    std::vector<char> tiles = _world.tiles;
    std::size_t row = _world.start_row, col = _world.start_col;
    std::vector<char> keys(_world.key_slots, 0);
    double points = 0.0;

    const std::size_t w = _world.width, h = _world.height;
    auto snapshot = [&](std::vector<double>& out) {
        out.assign(w * h, 0.0);
        for (std::size_t r = 0; r < h; r++) {
            for (std::size_t c = 0; c < w; c++) {
                std::size_t dr = r > row ? r - row : row - r;
                std::size_t dc = c > col ? c - col : col - c;
                if (std::max(dr, dc) > static_cast<std::size_t>(_world.fov))
                    continue; // masked out
                out[r * w + c] = (r == row && c == col) ? kAgentValue : tile_value(tiles[r * w + c]);
            }
        }
    };

    std::vector<double> input(w * h + _world.key_slots);
    std::vector<double> snap;
    std::array<double, 5> action_scores{};

    static constexpr int kRowStep[5] = {-1, 0, 1, 0, 0}; // up, right, down, left, stay
    static constexpr int kColStep[5] = {0, 1, 0, -1, 0};

    for (int step = 0; step < _world.steps; step++) {
        snapshot(snap);
        std::copy(snap.begin(), snap.end(), input.begin());
        for (std::size_t k = 0; k < _world.key_slots; k++)
            input[w * h + k] = keys[k] ? 1.0 : 0.0;
        _policy.forward(genome.params, input, action_scores);
        std::size_t action = static_cast<std::size_t>(std::max_element(action_scores.begin(), action_scores.end()) - action_scores.begin());

        long nr = static_cast<long>(row) + kRowStep[action];
        long nc = static_cast<long>(col) + kColStep[action];
        if (nr < 0 || nc < 0 || nr >= static_cast<long>(h) || nc >= static_cast<long>(w))
            continue;
        char target = tiles[static_cast<std::size_t>(nr) * w + static_cast<std::size_t>(nc)];
        if (target == '#')
            continue;
        if (is_door(target)) {
            std::size_t id = static_cast<std::size_t>(target - 'A');
            if (!keys[id])
                continue; // locked
            tiles[static_cast<std::size_t>(nr) * w + static_cast<std::size_t>(nc)] = '.';
            points += 20.0; // scores once; tile stays open
        }
        row = static_cast<std::size_t>(nr);
        col = static_cast<std::size_t>(nc);
        char here = tiles[row * w + col];
        if (is_key(here)) {
            keys[static_cast<std::size_t>(here - 'a')] = 1;
            tiles[row * w + col] = '.';
            points += 10.0;
        }
    }

    EvalOutcome out;
    out.fitness = points;
    snapshot(out.raw_bd);
    out.ground_truth_bd = {static_cast<double>(col), static_cast<double>(row)};
    return out;
}

} // namespace qdforge::env
