#include <qdforge/harness/experiment.hpp>
#include <qdforge/containers/grid.hpp>
#include <qdforge/containers/unstructured.hpp>
#include <qdforge/env/arm.hpp>
#include <qdforge/env/gridworld.hpp>
#include <qdforge/env/mobile.hpp>
#include <qdforge/harness/csv.hpp>
#include <qdforge/harness/snapshot.hpp>
#include <qdforge/harness/svg.hpp>

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace qdforge::harness {

namespace {

    constexpr const char* kCodeVersion = "0.1.0";

    enum class EnvKind { mobile, arm, gridworld };

    EnvKind env_kind(const ExperimentConfig& c)
    {
        if (c.experiment == "mobile_free" || c.experiment == "mobile_l_shape")
            return EnvKind::mobile;
        if (c.experiment == "arm" || c.experiment == "arm_constrained")
            return EnvKind::arm;
        return EnvKind::gridworld;
    }

    std::unique_ptr<env::Environment> build_environment(const ExperimentConfig& c)
    {
        switch (env_kind(c)) {
        case EnvKind::mobile: {
            auto world = env::MobileWorld::make(env::MobileWorld::preset_from_string(c.env.walls), c.env.raster_size);
            world.robot_radius = c.env.robot_radius;
            if (c.env.steps > 0)
                world.steps = c.env.steps;
            return std::make_unique<env::MobileEnv>(world);
        }
        case EnvKind::arm: {
            auto chain = env::ArmChain::make(c.env.constrained);
            if (c.env.steps > 0)
                chain.steps = c.env.steps;
            return std::make_unique<env::ArmEnv>(chain);
        }
        case EnvKind::gridworld: {
            auto world = c.env.map.empty() ? env::GridWorld::default_map() : env::GridWorld::from_file(c.env.map);
            if (c.env.steps > 0)
                world.steps = c.env.steps;
            return std::make_unique<env::GridworldEnv>(std::move(world));
        }
        }
        throw ConfigError("unreachable env kind");
    }

    std::unique_ptr<vqvae::VqVaeModel> build_model(const ExperimentConfig& c, const env::Environment& environment)
    {
        if (c.algorithm == "map-elites")
            return nullptr;
        vqvae::VqVaeOptions opts;
        opts.raw_dim = environment.raw_bd_dim();
        opts.latent_dim = c.model.latent_dim;
        opts.codebook_size = c.model.codebook_size;
        opts.hidden = c.model.hidden;
        opts.hidden_act = autodiff::activation_from_string(c.model.activation);
        opts.bounded = c.model.bounded;
        opts.beta = c.model.beta;
        opts.lr = c.model.lr;
        opts.input_scale = c.model.input_scale;
        opts.lr_decay = c.model.lr_decay;
        opts.kmeans_samples = c.model.kmeans_samples;
        opts.codebook_init = c.model.codebook_init == "kmeans" ? vqvae::CodebookInit::kmeans : vqvae::CodebookInit::normal;
        opts.seed = splitmix64(c.seed ^ 0x6d6f64656cULL);
        if (c.model.decoder_output == "auto")
            opts.sigmoid_output = env_kind(c) != EnvKind::arm;
        else
            opts.sigmoid_output = c.model.decoder_output == "sigmoid";
        return std::make_unique<vqvae::VqVaeModel>(opts);
    }

    autodiff::Tensor arm_centroids(const ExperimentConfig& c, bool constrained, std::size_t k)
    {
        auto chain = env::ArmChain::make(constrained);
        metrics::ArmGroundTruthOptions opts;
        opts.goal_eps = c.metrics.arm_eps;
        opts.target_samples = c.metrics.arm_samples;
        opts.sample_budget = c.metrics.arm_budget;
        opts.k = k;
        return metrics::build_ground_truth(chain, opts).grid.centroids;
    }

    std::unique_ptr<containers::ArchiveContainer> build_container(const ExperimentConfig& c,
                                                                  const vqvae::VqVaeModel* model,
                                                                  const RunOptions& options)
    {
        if (c.algorithm == "vq-elites" || c.algorithm == "aurora-dagger" || c.algorithm == "aurora") {
            if (c.algorithm == "vq-elites")
                return std::make_unique<containers::GridContainer>(model->codebook());
            containers::UnstructuredParams p;
            p.d_init = c.algorithm_params.d_init;
            p.d_min = c.algorithm_params.d_min;
            p.d_max = c.algorithm_params.d_max;
            p.k_csc = c.algorithm_params.k_csc;
            p.target_size = c.algorithm_params.target_size ? c.algorithm_params.target_size : c.model.codebook_size;
            p.max_size = c.algorithm_params.max_size;
            return std::make_unique<containers::UnstructuredArchive>(p);
        }

        // map-elites: hard-coded behavior grid
        switch (env_kind(c)) {
        case EnvKind::mobile: {
            containers::HardcodedGridSpec spec;
            double extent = 600.0;
            spec.lo = {0.0, 0.0};
            spec.hi = {extent, extent};
            spec.bins = {c.algorithm_params.me_bins, c.algorithm_params.me_bins};
            return std::make_unique<containers::GridContainer>(containers::hardcoded_grid(spec));
        }
        case EnvKind::arm: {
            containers::HardcodedGridSpec spec;
            if (options.shared_me_centroids) {
                spec.centroids = *options.shared_me_centroids;
            }
            else {
                bool constrained = c.env.constrained;
                if (c.algorithm_params.me_limits == "constrained")
                    constrained = true;
                else if (c.algorithm_params.me_limits == "unconstrained")
                    constrained = false;
                spec.centroids = arm_centroids(c, constrained, c.algorithm_params.me_centroids);
            }
            return std::make_unique<containers::GridContainer>(containers::hardcoded_grid(spec));
        }
        case EnvKind::gridworld: {
            auto world = c.env.map.empty() ? env::GridWorld::default_map() : env::GridWorld::from_file(c.env.map);
            containers::HardcodedGridSpec spec;
            spec.centroids = metrics::build_ground_truth(world).centroids;
            return std::make_unique<containers::GridContainer>(containers::hardcoded_grid(spec));
        }
        }
        throw ConfigError("unreachable container kind");
    }

    metrics::GroundTruthGrid build_gt(const ExperimentConfig& c, const env::Environment& environment)
    {
        switch (env_kind(c)) {
        case EnvKind::mobile: {
            const auto& world = static_cast<const env::MobileEnv&>(environment).world();
            return metrics::build_ground_truth(world, c.metrics.bins);
        }
        case EnvKind::arm: {
            const auto& chain = static_cast<const env::ArmEnv&>(environment).chain();
            metrics::ArmGroundTruthOptions opts;
            opts.goal_eps = c.metrics.arm_eps;
            opts.target_samples = c.metrics.arm_samples;
            opts.sample_budget = c.metrics.arm_budget;
            opts.k = c.metrics.arm_k;
            return metrics::build_ground_truth(chain, opts).grid;
        }
        case EnvKind::gridworld:
            return metrics::build_ground_truth(static_cast<const env::GridworldEnv&>(environment).world());
        }
        throw ConfigError("unreachable metrics grid kind");
    }

    std::string hash_hex(std::uint64_t h)
    {
        char buf[17];
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

} // namespace

qd::LoopContext ExperimentSetup::context()
{
    qd::LoopContext ctx;
    ctx.environment = environment.get();
    ctx.archive = archive.get();
    ctx.model = model.get();
    ctx.store = store.get();
    ctx.gt_grid = &gt_grid;
    ctx.schedule = schedule;
    ctx.variation = variation;
    return ctx;
}

ExperimentSetup build_setup(const ExperimentConfig& config, const RunOptions& options)
{
    validate_config(config);
    ExperimentSetup setup;
    setup.environment = build_environment(config);
    setup.model = build_model(config, *setup.environment);
    setup.archive = build_container(config, setup.model.get(), options);
    setup.store = std::make_unique<qd::ExperienceStore>(config.algorithm_params.store_capacity,
                                                        config.algorithm_params.dedup,
                                                        config.algorithm_params.dedup_threshold);
    setup.gt_grid = options.shared_gt ? *options.shared_gt : build_gt(config, *setup.environment);

    const auto& a = config.algorithm_params;
    setup.schedule.iterations = a.iterations;
    setup.schedule.population = a.population;
    setup.schedule.n_update = a.n_update;
    setup.schedule.epochs = a.epochs;
    setup.schedule.n_cooperation = a.n_cooperation;
    setup.schedule.bootstrap_evals = a.bootstrap_evals;
    setup.schedule.bootstrap_epochs = a.bootstrap_epochs;
    setup.schedule.batch_size = a.batch_size;
    setup.schedule.seed = config.seed;
    setup.schedule.genome_sigma = a.genome_sigma;
    setup.schedule.eval_workers = std::max<std::size_t>(options.eval_workers, 1);
    setup.schedule.metrics_interval = config.metrics.interval;
    setup.variation.p_crossover = a.p_crossover;
    setup.variation.p_mutation = a.p_mutation;
    setup.variation.sigma = a.sigma;

    switch (env_kind(config)) {
    case EnvKind::mobile:
        setup.projection_lo = {0.0, 0.0};
        setup.projection_hi = {600.0, 600.0};
        break;
    case EnvKind::arm: {
        const auto& chain = static_cast<const env::ArmEnv&>(*setup.environment).chain();
        setup.projection_lo = {chain.limits[0][0], chain.limits[1][0]};
        setup.projection_hi = {chain.limits[0][1], chain.limits[1][1]};
        break;
    }
    case EnvKind::gridworld: {
        const auto& world = static_cast<const env::GridworldEnv&>(*setup.environment).world();
        setup.projection_lo = {0.0, 0.0};
        setup.projection_hi = {static_cast<double>(world.width), static_cast<double>(world.height)};
        break;
    }
    }
    return setup;
}

std::filesystem::path default_output_root(const ExperimentConfig& config)
{
    if (!config.output_dir.empty())
        return config.output_dir;
    if (const char* env_root = std::getenv("QD_FORGE_OUT"); env_root && *env_root)
        return env_root;
    return "runs";
}

RunArtifacts run_experiment(const ExperimentConfig& config, const RunOptions& options)
{
    ExperimentSetup setup = build_setup(config, options);
    auto ctx = setup.context();

    RunArtifacts artifacts;
    artifacts.dir = options.out_dir.empty()
                        ? default_output_root(config) / (config.experiment + "-" + config.algorithm + "-seed" + std::to_string(config.seed))
                        : options.out_dir;
    std::filesystem::create_directories(artifacts.dir);

    artifacts.metrics_csv = artifacts.dir / "metrics.csv";
    std::ofstream csv(artifacts.metrics_csv);
    if (!csv)
        throw UsageError("cannot write metrics csv '" + artifacts.metrics_csv.string() + "'");
    write_metrics_header(csv);

    qd::RunObserver observer = [&](const metrics::MetricsRecord& rec, const containers::ArchiveContainer& archive) {
        write_metrics_row(csv, rec);
        csv.flush(); // keep a partial CSV on fatal errors
        if (options.observer)
            options.observer(rec, archive);
    };

    artifacts.result = qd::run(ctx, observer);
    csv.close();

    if (!options.write_artifacts)
        return artifacts;

    artifacts.archive_snapshot = artifacts.dir / "archive.bin";
    write_archive_snapshot(artifacts.archive_snapshot, setup.archive->members());

    if (setup.model) {
        artifacts.model_checkpoint = artifacts.dir / "model.json";
        write_model_checkpoint(artifacts.model_checkpoint, *setup.model);
    }

    auto members = setup.archive->members();
    auto projection = metrics::elite_grid_projection(members, setup.projection_lo, setup.projection_hi,
                                                     config.metrics.projection_bins);
    artifacts.elite_grid_svg = artifacts.dir / "elite_grid.svg";
    write_svg(artifacts.elite_grid_svg, elite_grid_svg(projection));

    if (setup.model && env_kind(config) != EnvKind::arm) {
        std::size_t side = env_kind(config) == EnvKind::mobile
                               ? config.env.raster_size
                               : static_cast<const env::GridworldEnv&>(*setup.environment).world().width;
        if (side * side == setup.model->raw_dim()) {
            artifacts.decoded_centers_svg = artifacts.dir / "decoded_centers.svg";
            write_svg(artifacts.decoded_centers_svg, decoded_centers_svg(setup.model->decode_codebook(), side));
        }
    }

    artifacts.manifest = artifacts.dir / "manifest.json";
    nlohmann::json manifest;
    manifest["version"] = kCodeVersion;
    manifest["experiment"] = config.experiment;
    manifest["algorithm"] = config.algorithm;
    manifest["seed"] = config.seed;
    manifest["config_hash"] = hash_hex(config_hash(config));
    manifest["config"] = canonical_config(config);
    manifest["audit_violations"] = artifacts.result.audit_violations;
    manifest["model_updates"] = artifacts.result.model_updates;
    manifest["evaluations"] = artifacts.result.evaluations;
    std::ofstream mf(artifacts.manifest);
    mf << manifest.dump(2) << "\n";

    return artifacts;
}

std::filesystem::path render_artifact(const std::filesystem::path& run_dir, const std::string& what,
                                      const std::filesystem::path& out_file)
{
    std::ifstream mf(run_dir / "manifest.json");
    if (!mf)
        throw ConfigError("no manifest.json in '" + run_dir.string() + "'");
    nlohmann::json manifest = nlohmann::json::parse(mf);
    ExperimentConfig config = parse_config(manifest.at("config").get<std::string>());

    if (what == "elite-grid") {
        auto members = read_archive_snapshot(run_dir / "archive.bin");
        std::vector<const qd::Individual*> ptrs;
        for (const auto& m : members)
            ptrs.push_back(&m);

        std::array<double, 2> lo{0.0, 0.0}, hi{600.0, 600.0};
        switch (env_kind(config)) {
        case EnvKind::mobile:
            break;
        case EnvKind::arm: {
            auto chain = env::ArmChain::make(config.env.constrained);
            lo = {chain.limits[0][0], chain.limits[1][0]};
            hi = {chain.limits[0][1], chain.limits[1][1]};
            break;
        }
        case EnvKind::gridworld: {
            auto world = config.env.map.empty() ? env::GridWorld::default_map() : env::GridWorld::from_file(config.env.map);
            hi = {static_cast<double>(world.width), static_cast<double>(world.height)};
            break;
        }
        }
        auto projection = metrics::elite_grid_projection(ptrs, lo, hi, config.metrics.projection_bins);
        auto path = out_file.empty() ? run_dir / "elite_grid.svg" : out_file;
        write_svg(path, elite_grid_svg(projection));
        return path;
    }

    if (what == "decoded-centers") {
        if (env_kind(config) == EnvKind::arm)
            throw ConfigError("decoded-centers is unsupported for the arm (1-D raw BD)");
        auto model = read_model_checkpoint(run_dir / "model.json");
        std::size_t side = env_kind(config) == EnvKind::mobile ? config.env.raster_size : 0;
        if (side == 0) {
            auto world = config.env.map.empty() ? env::GridWorld::default_map() : env::GridWorld::from_file(config.env.map);
            if (world.width != world.height)
                throw ConfigError("decoded-centers needs a square map");
            side = world.width;
        }
        auto path = out_file.empty() ? run_dir / "decoded_centers.svg" : out_file;
        write_svg(path, decoded_centers_svg(model->decode_codebook(), side));
        return path;
    }

    throw ConfigError("unknown render target '" + what + "' (use elite-grid or decoded-centers)");
}

} // namespace qdforge::harness
