#include <doctest.h>

#include <qdforge/common.hpp>
#include <qdforge/harness/config.hpp>
#include <qdforge/harness/csv.hpp>
#include <qdforge/harness/experiment.hpp>
#include <qdforge/harness/snapshot.hpp>
#include <qdforge/harness/summarize.hpp>
#include <qdforge/harness/svg.hpp>

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace qdforge;
using namespace qdforge::harness;

namespace {

    std::filesystem::path temp_dir(const std::string& name)
    {
        auto dir = std::filesystem::temp_directory_path() / "qdforge_tests" / name;
        std::filesystem::remove_all(dir);
        std::filesystem::create_directories(dir);
        return dir;
    }

    std::string slurp(const std::filesystem::path& path)
    {
        std::ifstream in(path, std::ios::binary);
        REQUIRE(in.good());
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }

    std::size_t count_occurrences(const std::string& text, const std::string& needle)
    {
        std::size_t count = 0, pos = 0;
        while ((pos = text.find(needle, pos)) != std::string::npos) {
            count++;
            pos += needle.size();
        }
        return count;
    }

    // small but complete mobile run for end-to-end checks
    ExperimentConfig tiny_mobile_config()
    {
        return parse_config("experiment = mobile_free\n"
                            "seed = 7\n"
                            "[env]\n"
                            "raster_size = 8\n"
                            "[algorithm]\n"
                            "iterations = 4\n"
                            "population = 4\n"
                            "n_update = 2\n"
                            "epochs = 1\n"
                            "bootstrap_evals = 6\n"
                            "bootstrap_epochs = 2\n"
                            "batch_size = 4\n"
                            "[metrics]\n"
                            "interval = 2\n"
                            "bins = 5\n"
                            "[model]\n"
                            "hidden = 16\n"
                            "codebook_size = 8\n"
                            "kmeans_samples = 200\n");
    }

} // namespace

TEST_CASE("config: a bare experiment line yields the full per-environment defaults")
{
    auto mobile = parse_config("experiment = mobile_free\n");
    CHECK(mobile.algorithm_params.iterations == 3000);
    CHECK(mobile.algorithm_params.population == 128);
    CHECK(mobile.model.codebook_size == 2000);
    CHECK(mobile.model.latent_dim == 2);
    CHECK(mobile.algorithm_params.epochs == 10);
    CHECK(mobile.model.lr == 7e-4);
    CHECK(mobile.algorithm_params.batch_size == 64);
    CHECK(mobile.algorithm_params.n_update == 5);
    CHECK(mobile.metrics.bins == 30);
    CHECK(mobile.env.walls == "free");
    CHECK(mobile.algorithm_params.dedup);

    auto arm = parse_config("experiment = arm\n");
    CHECK(arm.algorithm_params.iterations == 3000);
    CHECK(arm.model.codebook_size == 1500);
    CHECK(arm.model.latent_dim == 5);
    CHECK(arm.algorithm_params.n_update == 5);
    CHECK(arm.metrics.arm_k == 400);
    CHECK(!arm.env.constrained);
    CHECK(parse_config("experiment = arm_constrained\n").env.constrained);

    auto minigrid = parse_config("experiment = minigrid\n");
    CHECK(minigrid.algorithm_params.iterations == 10000);
    CHECK(minigrid.model.codebook_size == 400);
    CHECK(minigrid.model.latent_dim == 5);
    CHECK(minigrid.algorithm_params.n_update == 10);
}

TEST_CASE("config: aurora presets wire bounding, epochs and thresholds")
{
    auto aurora = parse_config("experiment = mobile_free\nalgorithm = aurora\n");
    CHECK(!aurora.model.bounded);
    CHECK(aurora.model.codebook_init == "normal");
    CHECK(aurora.algorithm_params.epochs == 100);
    CHECK(aurora.algorithm_params.d_max == 1e5);
    CHECK(aurora.algorithm_params.k_csc == 5e-6);
    CHECK(aurora.algorithm_params.n_cooperation == 0);

    auto dagger = parse_config("experiment = mobile_free\nalgorithm = aurora-dagger\n");
    CHECK(dagger.model.bounded);
    CHECK(dagger.algorithm_params.d_max == 1.0);
    CHECK(dagger.algorithm_params.k_csc == 5e-4);
    CHECK(dagger.algorithm_params.n_cooperation > 0);
}

TEST_CASE("config: errors carry the offending line or field")
{
    CHECK_THROWS_WITH_AS(parse_config(""), doctest::Contains("experiment"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("experiment = mobile_free\n[algorithm]\npopulation = 0\n"),
                         doctest::Contains("population"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("experiment = mobile_free\nnot_a_key = 3\n"),
                         doctest::Contains("line 2"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("experiment = mobile_free\n[bogus]\nx = 1\n"),
                         doctest::Contains("bogus.x"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("experiment = mobile_free\njust a line\n"),
                         doctest::Contains("line 2"), ConfigError);
    CHECK_THROWS_AS(parse_config("experiment = flying\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("experiment = mobile_free\n[model]\nactivation = softmax\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("experiment = mobile_free\n[algorithm]\niterations = abc\n"), ConfigError);
}

TEST_CASE("config: canonical form round-trips and is idempotent")
{
    std::string text = "experiment = arm_constrained\n"
                       "seed = 9\n"
                       "[algorithm]\n"
                       "iterations = 600\n"
                       "sigma = 0.125\n"
                       "[model]\n"
                       "hidden = 32,16\n";
    auto config = parse_config(text);
    auto canonical = canonical_config(config);
    auto reparsed = parse_config(canonical);
    CHECK(canonical_config(reparsed) == canonical);
    CHECK(config_hash(reparsed) == config_hash(config));
    CHECK(reparsed.algorithm_params.iterations == 600);
    CHECK(reparsed.algorithm_params.sigma == 0.125);
    CHECK(reparsed.model.hidden == std::vector<std::size_t>{32, 16});

    auto other = parse_config("experiment = arm\n");
    CHECK(config_hash(other) != config_hash(config));
}

TEST_CASE("format_double: shortest form parses back to the exact value")
{
    auto rng = make_rng(3);
    std::uniform_real_distribution<double> dist(-1e6, 1e6);
    for (int i = 0; i < 200; i++) {
        double v = dist(rng) * std::pow(10.0, i % 7 - 3);
        CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
}

TEST_CASE("metrics csv: pinned header and lossless round trip")
{
    std::vector<metrics::MetricsRecord> records;
    metrics::MetricsRecord rec;
    rec.iteration = 10;
    rec.coverage = 0.123456789123456789;
    rec.pqd = 1e-7;
    rec.edr = 2.0 / 3.0;
    rec.cds = rec.coverage * rec.edr;
    rec.archive_size = 42;
    rec.valid_size = 42;
    records.push_back(rec);

    auto csv = metrics_csv(records);
    CHECK(csv.substr(0, csv.find('\n')) == "iteration,coverage,pqd,edr,cds,archive_size,valid_size");

    auto dir = temp_dir("csv");
    std::ofstream(dir / "metrics.csv") << csv;
    auto loaded = read_metrics_csv((dir / "metrics.csv").string());
    REQUIRE(loaded.size() == 1);
    CHECK(loaded[0].iteration == 10);
    CHECK(loaded[0].coverage == rec.coverage);
    CHECK(loaded[0].pqd == rec.pqd);
    CHECK(loaded[0].edr == rec.edr);
    CHECK(loaded[0].cds == rec.cds);
    CHECK(loaded[0].archive_size == 42);
}

TEST_CASE("archive snapshot: deserialize(serialize(x)) compares equal")
{
    auto rng = make_rng(5);
    std::uniform_real_distribution<double> unit(-2.0, 2.0);
    std::vector<qd::Individual> members(17);
    for (std::size_t i = 0; i < members.size(); i++) {
        auto& m = members[i];
        m.fitness = unit(rng);
        m.cell = static_cast<int>(i * 3) - 1;
        for (int g = 0; g < 9; g++)
            m.genome.params.push_back(unit(rng));
        for (int r = 0; r < 5; r++)
            m.raw_bd.push_back(unit(rng));
        m.latent_bd = {unit(rng), unit(rng)};
        m.ground_truth_bd = {unit(rng), unit(rng), unit(rng)};
    }
    std::vector<const qd::Individual*> ptrs;
    for (const auto& m : members)
        ptrs.push_back(&m);

    auto dir = temp_dir("snapshot");
    write_archive_snapshot(dir / "archive.bin", ptrs);
    auto loaded = read_archive_snapshot(dir / "archive.bin");
    REQUIRE(loaded.size() == members.size());
    for (std::size_t i = 0; i < members.size(); i++) {
        CHECK(loaded[i].fitness == members[i].fitness);
        CHECK(loaded[i].cell == members[i].cell);
        CHECK(loaded[i].genome.params == members[i].genome.params);
        CHECK(loaded[i].raw_bd == members[i].raw_bd);
        CHECK(loaded[i].latent_bd == members[i].latent_bd);
        CHECK(loaded[i].ground_truth_bd == members[i].ground_truth_bd);
    }

    CHECK_THROWS_AS(read_archive_snapshot(dir / "missing.bin"), UsageError);
}

TEST_CASE("model checkpoint: reload reproduces parameters and encodings")
{
    vqvae::VqVaeOptions opts;
    opts.raw_dim = 6;
    opts.latent_dim = 2;
    opts.codebook_size = 5;
    opts.hidden = {8};
    opts.seed = 77;
    vqvae::VqVaeModel model(opts);

    auto dir = temp_dir("checkpoint");
    write_model_checkpoint(dir / "model.json", model);
    auto loaded = read_model_checkpoint(dir / "model.json");
    CHECK(loaded->flatten_parameters() == model.flatten_parameters());

    auto rng = make_rng(9);
    autodiff::Tensor raw = autodiff::Tensor::zeros({3, 6});
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (auto& v : raw.data)
        v = unit(rng);
    CHECK(loaded->encode(raw).data == model.encode(raw).data);
}

TEST_CASE("svg: cell count, empty marking and colormap endpoints")
{
    metrics::EliteGridProjection empty;
    empty.bins = 8;
    empty.values.assign(64, 0.0);
    empty.occupied.assign(64, 0);
    auto svg = elite_grid_svg(empty);
    CHECK(count_occurrences(svg, "<rect class=\"cell\"") == 64);
    CHECK(count_occurrences(svg, "data-empty=\"1\"") == 64);

    // two occupied cells: min maps to the cold color, max to the hot one
    metrics::EliteGridProjection two = empty;
    two.occupied[3] = 1;
    two.values[3] = 0.0;
    two.occupied[60] = 1;
    two.values[60] = 1.0;
    auto svg2 = elite_grid_svg(two);
    CHECK(count_occurrences(svg2, std::string("fill=\"") + kColdColor + "\"") == 1);
    CHECK(count_occurrences(svg2, std::string("fill=\"") + kHotColor + "\"") == 1);
    CHECK(count_occurrences(svg2, "data-empty=\"1\"") == 62);

    CHECK(colormap_hex(0.0) == kColdColor);
    CHECK(colormap_hex(1.0) == kHotColor);
}

TEST_CASE("summarize: single run, fixed medians, sort-based oracle, misalignment error")
{
    auto root = temp_dir("summarize");

    auto write_run = [&](const std::string& name, const std::vector<double>& coverages) {
        auto dir = root / name;
        std::filesystem::create_directories(dir);
        std::ofstream out(dir / "metrics.csv");
        write_metrics_header(out);
        for (std::size_t i = 0; i < coverages.size(); i++) {
            metrics::MetricsRecord rec;
            rec.iteration = static_cast<std::int64_t>(i * 10);
            rec.coverage = coverages[i];
            rec.pqd = coverages[i] * 2.0;
            rec.edr = 1.0;
            rec.cds = rec.coverage;
            rec.archive_size = i;
            rec.valid_size = i;
            write_metrics_row(out, rec);
        }
        return dir;
    };

    auto a = write_run("a", {0.1, 0.2});
    auto single = summarize_runs({a});
    std::istringstream lines(single);
    std::string header, row;
    std::getline(lines, header);
    const std::string expected_prefix = "iteration,coverage_q25,coverage_median,coverage_q75";
    CHECK(header.substr(0, expected_prefix.size()) == expected_prefix);
    std::getline(lines, row);
    const std::string one_run = "0,0.1,0.1,0.1,"; // q25 == median == q75 for one run
    CHECK(row.substr(0, one_run.size()) == one_run);

    auto b = write_run("b", {0.2, 0.3});
    auto c = write_run("c", {0.3, 0.4});
    auto three = summarize_runs({a, b, c});
    // {0.1,0.2,0.3}: interpolated quarters around the exact median
    std::string mid = "0," + format_double(0.1 + 0.5 * (0.2 - 0.1)) + ",0.2," + format_double(0.2 + 0.5 * (0.3 - 0.2));
    CHECK(three.find(mid) != std::string::npos);

    // five synthetic runs against an independent sort-based computation
    std::vector<std::filesystem::path> five;
    std::vector<double> finals;
    auto rng = make_rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 5; i++) {
        double v = unit(rng);
        finals.push_back(v);
        five.push_back(write_run("r" + std::to_string(i), {v}));
    }
    auto summary = summarize_runs(five);
    std::sort(finals.begin(), finals.end());
    auto lerp = [&](double q) {
        double pos = q * 4.0;
        auto lo = static_cast<std::size_t>(pos);
        auto hi = std::min<std::size_t>(lo + 1, 4);
        return finals[lo] + (pos - static_cast<double>(lo)) * (finals[hi] - finals[lo]);
    };
    std::string expected = "0," + format_double(lerp(0.25)) + "," + format_double(lerp(0.5)) + "," + format_double(lerp(0.75));
    CHECK(summary.find(expected) != std::string::npos);

    auto misaligned = write_run("bad", {0.1, 0.2, 0.3});
    CHECK_THROWS_WITH_AS(summarize_runs({a, misaligned}), doctest::Contains("bad"), ConfigError);
}

TEST_CASE("run_experiment: smoke run writes every artifact and reruns are byte-identical")
{
    auto config = tiny_mobile_config();
    auto root = temp_dir("experiment");

    RunOptions opt1;
    opt1.out_dir = root / "run1";
    auto first = run_experiment(config, opt1);
    CHECK(std::filesystem::exists(first.metrics_csv));
    CHECK(std::filesystem::exists(first.archive_snapshot));
    CHECK(std::filesystem::exists(first.model_checkpoint));
    CHECK(std::filesystem::exists(first.manifest));
    CHECK(std::filesystem::exists(first.elite_grid_svg));
    CHECK(std::filesystem::exists(first.decoded_centers_svg));
    CHECK(first.result.metrics.size() == 3); // sampled at iterations 0, 2, 4
    CHECK(first.result.model_updates == 2);
    CHECK(first.result.audit_violations == 0);

    RunOptions opt2;
    opt2.out_dir = root / "run2";
    opt2.eval_workers = 3;
    auto second = run_experiment(config, opt2);
    CHECK(slurp(first.metrics_csv) == slurp(second.metrics_csv));
    CHECK(slurp(first.archive_snapshot) == slurp(second.archive_snapshot));

    // --seed flows into the artifacts: a different seed changes the csv
    auto other = config;
    other.seed = 8;
    RunOptions opt3;
    opt3.out_dir = root / "run3";
    auto third = run_experiment(other, opt3);
    CHECK(slurp(first.metrics_csv) != slurp(third.metrics_csv));

    // manifest echoes the config hash
    auto manifest = slurp(first.manifest);
    char expected_hash[32];
    std::snprintf(expected_hash, sizeof(expected_hash), "%016llx", static_cast<unsigned long long>(config_hash(config)));
    CHECK(manifest.find(expected_hash) != std::string::npos);
}

TEST_CASE("render_artifact: both targets render from a finished run; arm rejects decoded-centers")
{
    auto config = tiny_mobile_config();
    auto root = temp_dir("render");
    RunOptions opts;
    opts.out_dir = root / "run";
    run_experiment(config, opts);

    auto grid_svg = render_artifact(root / "run", "elite-grid", root / "grid.svg");
    CHECK(slurp(grid_svg).find("<svg") == 0);
    auto centers_svg = render_artifact(root / "run", "decoded-centers", root / "centers.svg");
    auto centers = slurp(centers_svg);
    CHECK(count_occurrences(centers, "<g class=\"center\"") == 8);

    CHECK_THROWS_AS(render_artifact(root / "run", "heatmap"), ConfigError);

    // a fake arm manifest is enough to hit the unsupported path
    auto arm_dir = root / "arm";
    std::filesystem::create_directories(arm_dir);
    nlohmann::json manifest;
    manifest["config"] = canonical_config(parse_config("experiment = arm\n"));
    std::ofstream(arm_dir / "manifest.json") << manifest.dump();
    CHECK_THROWS_WITH_AS(render_artifact(arm_dir, "decoded-centers"), doctest::Contains("unsupported"), ConfigError);
}
