#include <doctest.h>

#include <qdforge/common.hpp>
#include <qdforge/env/arm.hpp>
#include <qdforge/env/gridworld.hpp>
#include <qdforge/env/mobile.hpp>
#include <qdforge/env/raster.hpp>

#include <cmath>

using namespace qdforge;
using namespace qdforge::env;
using qdforge::qd::Genome;

namespace {

    Genome zero_genome(const Environment& e)
    {
        Genome g;
        g.params.assign(e.genome_size(), 0.0);
        return g;
    }

    Genome random_genome(const Environment& e, Rng& rng, double sigma = 1.0)
    {
        Genome g;
        std::normal_distribution<double> dist(0.0, sigma);
        g.params.resize(e.genome_size());
        for (auto& p : g.params)
            p = dist(rng);
        return g;
    }

} // namespace

TEST_CASE("mobile: zero policy stays put and scores one point per step")
{
    MobileEnv env(MobileWorld::make(MobileWorld::Preset::free));
    auto out = env.evaluate(zero_genome(env));
    CHECK(out.fitness == doctest::Approx(400.0).epsilon(1e-12));
    CHECK(out.ground_truth_bd[0] == 300.0);
    CHECK(out.ground_truth_bd[1] == 300.0);
}

TEST_CASE("mobile: straight-line run matches an independent scalar replay")
{
    MobileWorld world = MobileWorld::make(MobileWorld::Preset::free);
    MobileEnv env(world);

    // zero weights, equal wheel biases: both wheels tanh(b), no turning
    Genome g = zero_genome(env);
    const double wheel = 0.1;
    double bias = std::atanh(wheel);
    // layout: W1(4x16), b1(16), W2(16x2), b2(2)
    g.params[4 * 16 + 16 + 16 * 2 + 0] = bias;
    g.params[4 * 16 + 16 + 16 * 2 + 1] = bias;

    auto out = env.evaluate(g);

    // scalar replay: v = wheel * v_max, heading 0 from the center
    double v = wheel * world.v_max;
    std::vector<double> xs;
    double x = world.start[0];
    for (int i = 0; i < world.steps; i++) {
        x += v * world.dt;
        xs.push_back(x);
    }
    double fitness = 0.0;
    for (double xi : xs)
        fitness += std::exp(-std::abs(xi - xs.back()) / world.extent);
    CHECK(out.fitness == doctest::Approx(fitness).epsilon(1e-12));
    CHECK(out.ground_truth_bd[0] == doctest::Approx(xs.back()).epsilon(1e-12));
    CHECK(out.ground_truth_bd[1] == 300.0);
}

TEST_CASE("mobile: full raster is exactly the disc and pooling matches the fast path bitwise")
{
    MobileWorld world = MobileWorld::make(MobileWorld::Preset::free, 16);
    const double px = 123.4, py = 456.7;

    auto full = full_position_raster(world, px, py);
    std::size_t ones = 0;
    for (std::size_t row = 0; row < 600; row++) {
        for (std::size_t col = 0; col < 600; col++) {
            double dx = (static_cast<double>(col) + 0.5) - px;
            double dy = (static_cast<double>(row) + 0.5) - py;
            bool inside = dx * dx + dy * dy <= world.robot_radius * world.robot_radius;
            CHECK(full[row * 600 + col] == (inside ? 1.0 : 0.0));
            ones += inside;
        }
    }
    CHECK(ones > 0);

    auto pooled = pool_raster(full, 600, 16);
    auto fast = pooled_position_raster(world, px, py);
    CHECK(pooled == fast);
}

TEST_CASE("mobile: evaluation is pure and raster values live in [0,1]")
{
    MobileEnv env(MobileWorld::make(MobileWorld::Preset::free));
    auto rng = make_rng(5);
    Genome g = random_genome(env, rng);
    auto a = env.evaluate(g);
    auto b = env.evaluate(g);
    CHECK(a.fitness == b.fitness);
    CHECK(a.raw_bd == b.raw_bd);
    CHECK(a.ground_truth_bd == b.ground_truth_bd);
    CHECK(a.raw_bd.size() == 16 * 16);
    for (double v : a.raw_bd) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    // fitness bounds: last term is exp(0)=1 and every term is at most 1
    CHECK(a.fitness >= 1.0);
    CHECK(a.fitness <= 400.0);
}

TEST_CASE("mobile: l-shape walls are never penetrated")
{
    MobileEnv env(MobileWorld::make(MobileWorld::Preset::l_shape));
    const auto& world = env.world();
    auto rng = make_rng(6);
    for (int trial = 0; trial < 20; trial++) {
        auto trace = env.simulate(random_genome(env, rng, 2.0));
        for (const auto& p : trace.positions) {
            CHECK(!world.collides(p[0], p[1]));
            CHECK(p[0] >= world.robot_radius);
            CHECK(p[1] >= world.robot_radius);
            CHECK(p[0] <= world.extent - world.robot_radius);
            CHECK(p[1] <= world.extent - world.robot_radius);
            CHECK(!(p[0] > 200.0 && p[1] > 200.0)); // blocked quadrant
        }
    }
}

TEST_CASE("mobile: genome length mismatch is rejected")
{
    MobileEnv env(MobileWorld::make(MobileWorld::Preset::free));
    Genome g;
    g.params.assign(3, 0.0);
    CHECK_THROWS_AS(env.evaluate(g), UsageError);
}

TEST_CASE("arm: forward kinematics matches hand trigonometry on a planar sub-case")
{
    ArmChain chain = ArmChain::make(false);
    const double a = 0.7, b = -1.2, L = chain.link_length;
    std::array<double, 6> q{a, 0.0, b, 0.0, 0.0, 0.0};
    auto tip = forward_kinematics(chain, q);
    double ex = 2 * L * std::cos(a) + 4 * L * std::cos(a + b);
    double ey = 2 * L * std::sin(a) + 4 * L * std::sin(a + b);
    CHECK(std::abs(tip[0] - ex) < 1e-9);
    CHECK(std::abs(tip[1] - ey) < 1e-9);
    CHECK(std::abs(tip[2] - 0.0) < 1e-9);
}

TEST_CASE("arm: end-effector on the goal gives fitness one; zero policy matches the FK oracle")
{
    ArmChain chain = ArmChain::make(false);
    std::array<double, 6> zeros{};
    auto start_tip = forward_kinematics(chain, zeros);

    // goal placed exactly on the start tip: zero-velocity policy scores 1
    ArmChain at_goal = chain;
    at_goal.goal = start_tip;
    ArmEnv env_at_goal(at_goal);
    CHECK(env_at_goal.evaluate(zero_genome(env_at_goal)).fitness == doctest::Approx(1.0).epsilon(1e-15));

    ArmEnv env(chain);
    auto out = env.evaluate(zero_genome(env));
    double dx = chain.goal[0] - start_tip[0];
    double dy = chain.goal[1] - start_tip[1];
    double dz = chain.goal[2] - start_tip[2];
    CHECK(out.fitness == doctest::Approx(std::exp(-std::sqrt(dx * dx + dy * dy + dz * dz))).epsilon(1e-12));
    CHECK(out.raw_bd == std::vector<double>(6, 0.0));
}

TEST_CASE("arm: fitness in (0,1] and joints clamped to their limits")
{
    for (bool constrained : {false, true}) {
        ArmEnv env(ArmChain::make(constrained));
        auto rng = make_rng(7);
        for (int trial = 0; trial < 10; trial++) {
            auto out = env.evaluate(random_genome(env, rng));
            CHECK(out.fitness > 0.0);
            CHECK(out.fitness <= 1.0);
            for (std::size_t j = 0; j < 6; j++) {
                CHECK(out.raw_bd[j] >= env.chain().limits[j][0]);
                CHECK(out.raw_bd[j] <= env.chain().limits[j][1]);
            }
        }
    }
}

TEST_CASE("gridworld: map parsing catches malformed input")
{
    CHECK_THROWS_AS(GridWorld::from_text("###\n#@#\n##"), ConfigError);  // ragged
    CHECK_THROWS_AS(GridWorld::from_text("###\n#.#\n###"), ConfigError); // no start
    CHECK_THROWS_AS(GridWorld::from_text("####\n#@A#\n####"), ConfigError); // door without key
    CHECK_THROWS_AS(GridWorld::from_text("####\n#@x#\n####"), ConfigError); // unknown tile
    CHECK_THROWS_AS(GridWorld::from_text("#####\n#@.@#\n#####"), ConfigError); // two starts

    auto world = GridWorld::default_map();
    CHECK(world.width == 18);
    CHECK(world.height == 18);
    CHECK(world.key_slots == 3);
    CHECK(world.max_score() == 90);
}

TEST_CASE("gridworld: stay-still policy scores zero and ends on the start tile")
{
    GridworldEnv env(GridWorld::default_map());
    Genome g = zero_genome(env);
    // bias the stay action so argmax picks it every step
    g.params[g.params.size() - 1] = 5.0;
    auto out = env.evaluate(g);
    CHECK(out.fitness == 0.0);
    CHECK(out.ground_truth_bd[0] == static_cast<double>(env.world().start_col));
    CHECK(out.ground_truth_bd[1] == static_cast<double>(env.world().start_row));
}

TEST_CASE("gridworld: masked snapshot zeroes everything outside the field of view")
{
    GridworldEnv env(GridWorld::default_map());
    Genome g = zero_genome(env);
    g.params[g.params.size() - 1] = 5.0; // stay
    auto out = env.evaluate(g);
    const auto& world = env.world();
    for (std::size_t r = 0; r < world.height; r++) {
        for (std::size_t c = 0; c < world.width; c++) {
            std::size_t dr = r > world.start_row ? r - world.start_row : world.start_row - r;
            std::size_t dc = c > world.start_col ? c - world.start_col : world.start_col - c;
            double v = out.raw_bd[r * world.width + c];
            if (std::max(dr, dc) > 3)
                CHECK(v == 0.0);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("gridworld: a searched genome walks onto the key for exactly 10 points")
{
    GridWorld tiny = GridWorld::from_text("#####\n"
                                          "#@a.#\n"
                                          "#...#\n"
                                          "#...#\n"
                                          "#####");
    tiny.steps = 20;
    GridworldEnv env(tiny);
    CHECK(env.world().max_score() == 10);

    auto rng = make_rng(40);
    bool found = false;
    for (int attempt = 0; attempt < 400 && !found; attempt++) {
        auto out = env.evaluate(random_genome(env, rng));
        if (out.fitness == 10.0)
            found = true;
        CHECK(out.fitness <= 10.0);
        CHECK(std::fmod(out.fitness, 10.0) == 0.0);
    }
    CHECK(found);
}

TEST_CASE("gridworld: key unlocks the matching door and both score once")
{
    // corridor: grab key 'a', open door 'A', walk through
    GridWorld map = GridWorld::from_text("#######\n"
                                         "#@.aA.#\n"
                                         "#######");
    map.steps = 12;
    GridworldEnv env(map);
    Genome g = zero_genome(env);
    // bias the right action strongly
    auto spec = env.policy();
    std::size_t bias_off = spec.sizes[0] * 32 + 32 + 32 * 5;
    g.params[bias_off + 1] = 5.0; // right
    auto out = env.evaluate(g);
    CHECK(out.fitness == 30.0);
    CHECK(out.ground_truth_bd[0] == 5.0); // walked through the opened door
}

TEST_CASE("raster_iou: identical, disjoint and the empty edge case")
{
    std::vector<double> a{1, 0, 1, 0};
    std::vector<double> b{0, 1, 0, 1};
    std::vector<double> empty{0, 0, 0, 0};
    CHECK(raster_iou(a, a) == 1.0);
    CHECK(raster_iou(a, b) == 0.0);
    CHECK(raster_iou(empty, empty) == 1.0);
    CHECK(raster_iou(a, std::vector<double>{1, 1, 1, 0}) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("filter_duplicates: identical rasters collapse, disjoint ones survive")
{
    qd::ExperienceStore store(100);
    store.append({1, 0, 0, 0});
    store.append({1, 0, 0, 0});
    store.append({0, 0, 1, 0});
    auto kept = filter_duplicates(store, 0.9);
    CHECK(kept == std::vector<std::size_t>{0, 2});

    // threshold 1.0 never drops (IoU cannot exceed 1)
    CHECK(filter_duplicates(store, 1.0).size() == 3);
}

TEST_CASE("filter_duplicates: 100 random rasters match the brute-force greedy oracle")
{
    auto rng = make_rng(50);
    qd::ExperienceStore store(200);
    std::uniform_int_distribution<int> coin(0, 3);
    std::vector<std::vector<double>> rasters;
    for (int i = 0; i < 100; i++) {
        std::vector<double> r(36, 0.0);
        for (auto& v : r)
            v = coin(rng) == 0 ? 1.0 : 0.0;
        rasters.push_back(r);
        store.append(r);
    }

    const double threshold = 0.5;
    auto kept = filter_duplicates(store, threshold);

    // plain O(n^2) greedy oracle
    std::vector<std::size_t> expected;
    for (std::size_t i = 0; i < rasters.size(); i++) {
        bool keep = true;
        for (std::size_t j : expected)
            if (raster_iou(rasters[i], rasters[j]) > threshold) {
                keep = false;
                break;
            }
        if (keep)
            expected.push_back(i);
    }
    CHECK(kept == expected);
}

TEST_CASE("experience store: capacity evicts oldest first")
{
    qd::ExperienceStore store(3);
    for (double v = 0; v < 5; v++)
        store.append({v});
    CHECK(store.size() == 3);
    CHECK(store.record(0)[0] == 2.0);
    CHECK(store.record(2)[0] == 4.0);
}
