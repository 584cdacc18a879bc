#include <qdforge/harness/config.hpp>
#include <qdforge/common.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace qdforge::harness {

namespace {

    std::string trim(const std::string& s)
    {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    }

    [[noreturn]] void bad_value(const std::string& field, const std::string& value)
    {
        throw ConfigError("invalid value '" + value + "' for " + field);
    }

    double parse_double(const std::string& field, const std::string& v)
    {
        double out = 0.0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc() || p != v.data() + v.size())
            bad_value(field, v);
        return out;
    }

    std::int64_t parse_i64(const std::string& field, const std::string& v)
    {
        std::int64_t out = 0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc() || p != v.data() + v.size())
            bad_value(field, v);
        return out;
    }

    std::uint64_t parse_u64(const std::string& field, const std::string& v)
    {
        std::uint64_t out = 0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc() || p != v.data() + v.size())
            bad_value(field, v);
        return out;
    }

    std::size_t parse_size(const std::string& field, const std::string& v)
    {
        return static_cast<std::size_t>(parse_u64(field, v));
    }

    bool parse_bool(const std::string& field, const std::string& v)
    {
        if (v == "true")
            return true;
        if (v == "false")
            return false;
        bad_value(field, v);
    }

    std::vector<std::size_t> parse_size_list(const std::string& field, const std::string& v)
    {
        std::vector<std::size_t> out;
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty())
                out.push_back(parse_size(field, item));
        }
        if (out.empty())
            bad_value(field, v);
        return out;
    }

    std::string format_real(double v)
    {
        char buf[64];
        auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
        return std::string(buf, p);
    }

    void apply_experiment_preset(ExperimentConfig& c)
    {
        auto& a = c.algorithm_params;
        auto& m = c.model;
        if (c.experiment == "mobile_free" || c.experiment == "mobile_l_shape") {
            c.env.walls = (c.experiment == "mobile_free") ? "free" : "l_shape";
            c.env.raster_size = 16;
            a.iterations = 3000;
            a.n_update = 5;
            a.dedup = true;
            m.hidden = {64};
            m.latent_dim = 2;
            m.codebook_size = 2000;
            m.activation = "gelu";
            // downsampled rasters are sparse and weak; precondition them and
            // reconstruct through a linear head
            m.input_scale = 20.0;
            m.decoder_output = "linear";
            c.metrics.bins = 30;
        }
        else if (c.experiment == "arm" || c.experiment == "arm_constrained") {
            c.env.constrained = (c.experiment == "arm_constrained");
            a.iterations = 3000;
            a.n_update = 5;
            m.hidden = {64, 64};
            m.latent_dim = 5;
            m.codebook_size = 1500;
            m.activation = "relu";
        }
        else if (c.experiment == "minigrid") {
            a.iterations = 10000;
            a.n_update = 10;
            m.hidden = {64};
            m.latent_dim = 5;
            m.codebook_size = 400;
            m.activation = "silu";
        }
        else {
            throw ConfigError("unknown experiment '" + c.experiment + "'");
        }
    }

    void apply_algorithm_preset(ExperimentConfig& c)
    {
        auto& a = c.algorithm_params;
        bool minigrid = c.experiment == "minigrid";
        bool arm = c.experiment == "arm" || c.experiment == "arm_constrained";
        if (c.algorithm == "vq-elites" || c.algorithm == "map-elites")
            return;
        if (c.algorithm == "aurora") {
            c.model.bounded = false;
            c.model.codebook_init = "normal";
            a.epochs = 100;
            a.d_init = 1e-5;
            a.d_min = 1e-5;
            a.d_max = 1e5;
            a.k_csc = 5e-6;
            a.max_size = minigrid ? 800 : (arm ? 2500 : 5000);
        }
        else if (c.algorithm == "aurora-dagger") {
            c.model.bounded = true;
            c.model.codebook_init = "kmeans";
            a.epochs = 100;
            a.d_init = 1e-5;
            a.d_min = 1e-5;
            a.d_max = 1.0;
            a.k_csc = 5e-4;
            a.n_cooperation = minigrid ? 1000 : 300;
            a.max_size = minigrid ? 800 : (arm ? 2500 : 5000);
        }
        else {
            throw ConfigError("unknown algorithm '" + c.algorithm + "'");
        }
    }

    using Setter = std::function<void(ExperimentConfig&, const std::string& field, const std::string& value)>;

    const std::map<std::string, Setter>& setters()
    {
        static const std::map<std::string, Setter> table = {
            {"algorithm", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.algorithm = v; }},
            {"experiment", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.experiment = v; }},
            {"output_dir", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.output_dir = v; }},
            {"seed", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.seed = parse_u64(f, v); }},

            {"env.walls", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.env.walls = v; }},
            {"env.raster_size", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.env.raster_size = parse_size(f, v); }},
            {"env.robot_radius", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.env.robot_radius = parse_double(f, v); }},
            {"env.map", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.env.map = v; }},
            {"env.steps", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.env.steps = static_cast<int>(parse_i64(f, v)); }},
            {"env.constrained", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.env.constrained = parse_bool(f, v); }},

            {"algorithm.iterations", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.algorithm_params.iterations = parse_i64(f, v); }},
            {"algorithm.population", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.algorithm_params.population = parse_size(f, v); }},
            {"algorithm.n_update", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.algorithm_params.n_update = parse_i64(f, v); }},
            {"algorithm.epochs", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.algorithm_params.epochs = parse_size(f, v); }},
            {"algorithm.n_cooperation", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.algorithm_params.n_cooperation = parse_i64(f, v); }},
            {"algorithm.bootstrap_evals", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.algorithm_params.bootstrap_evals = parse_size(f, v); }},
            {"algorithm.bootstrap_epochs", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.algorithm_params.bootstrap_epochs = parse_size(f, v); }},
            {"algorithm.batch_size", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.algorithm_params.batch_size = parse_size(f, v); }},
            {"algorithm.genome_sigma", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.algorithm_params.genome_sigma = parse_double(f, v); }},
            {"algorithm.p_crossover", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.algorithm_params.p_crossover = parse_double(f, v); }},
            {"algorithm.p_mutation", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.algorithm_params.p_mutation = parse_double(f, v); }},
            {"algorithm.sigma", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.algorithm_params.sigma = parse_double(f, v); }},
            {"algorithm.store_capacity", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.algorithm_params.store_capacity = parse_size(f, v); }},
            {"algorithm.dedup", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.algorithm_params.dedup = parse_bool(f, v); }},
            {"algorithm.dedup_threshold", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.algorithm_params.dedup_threshold = parse_double(f, v); }},
            {"algorithm.d_init", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.algorithm_params.d_init = parse_double(f, v); }},
            {"algorithm.d_min", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.algorithm_params.d_min = parse_double(f, v); }},
            {"algorithm.d_max", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.algorithm_params.d_max = parse_double(f, v); }},
            {"algorithm.k_csc", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.algorithm_params.k_csc = parse_double(f, v); }},
            {"algorithm.target_size", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.algorithm_params.target_size = parse_size(f, v); }},
            {"algorithm.max_size", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.algorithm_params.max_size = parse_size(f, v); }},
            {"algorithm.me_bins", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.algorithm_params.me_bins = parse_size(f, v); }},
            {"algorithm.me_limits", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.algorithm_params.me_limits = v; }},
            {"algorithm.me_centroids", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.algorithm_params.me_centroids = parse_size(f, v); }},

            {"model.hidden", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.model.hidden = parse_size_list(f, v); }},
            {"model.latent_dim", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.model.latent_dim = parse_size(f, v); }},
            {"model.codebook_size", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.model.codebook_size = parse_size(f, v); }},
            {"model.activation", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.model.activation = v; }},
            {"model.bounded", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.model.bounded = parse_bool(f, v); }},
            {"model.codebook_init", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.model.codebook_init = v; }},
            {"model.kmeans_samples", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.model.kmeans_samples = parse_size(f, v); }},
            {"model.beta", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.model.beta = parse_double(f, v); }},
            {"model.lr", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.model.lr = parse_double(f, v); }},
            {"model.input_scale", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.model.input_scale = parse_double(f, v); }},
            {"model.lr_decay", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.model.lr_decay = parse_double(f, v); }},
            {"model.decoder_output", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.model.decoder_output = v; }},

            {"metrics.interval", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.metrics.interval = parse_i64(f, v); }},
            {"metrics.bins", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.metrics.bins = parse_size(f, v); }},
            {"metrics.projection_bins", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.metrics.projection_bins = parse_size(f, v); }},
            {"metrics.arm_eps", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.metrics.arm_eps = parse_double(f, v); }},
            {"metrics.arm_samples", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.metrics.arm_samples = parse_size(f, v); }},
            {"metrics.arm_budget", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.metrics.arm_budget = parse_size(f, v); }},
            {"metrics.arm_k", [](ExperimentConfig& c, const std::string& f, const std::string& v) { c.metrics.arm_k = parse_size(f, v); }},
        };
        return table;
    }

    struct Entry {
        std::string field; // section.key or bare key
        std::string value;
        std::size_t line;
    };

    std::vector<Entry> tokenize(const std::string& text)
    {
        std::vector<Entry> entries;
        std::istringstream in(text);
        std::string line, section;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            lineno++;
            auto hash = line.find('#');
            if (hash != std::string::npos)
                line = line.substr(0, hash);
            line = trim(line);
            if (line.empty())
                continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
                section = trim(line.substr(1, line.size() - 2));
                if (section.empty())
                    throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (key.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": empty key");
            entries.push_back({section.empty() ? key : section + "." + key, value, lineno});
        }
        return entries;
    }

} // namespace

ExperimentConfig parse_config(const std::string& text)
{
    auto entries = tokenize(text);

    std::string experiment, algorithm = "vq-elites";
    for (const auto& e : entries) {
        if (e.field == "experiment")
            experiment = e.value;
        else if (e.field == "algorithm")
            algorithm = e.value;
    }
    if (experiment.empty())
        throw ConfigError("missing required key 'experiment'");

    ExperimentConfig config;
    config.experiment = experiment;
    config.algorithm = algorithm;
    apply_experiment_preset(config);
    apply_algorithm_preset(config);

    const auto& table = setters();
    for (const auto& e : entries) {
        auto it = table.find(e.field);
        if (it == table.end())
            throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" + e.field + "'");
        it->second(config, e.field, e.value);
    }

    validate_config(config);
    return config;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void validate_config(const ExperimentConfig& c)
{
    auto require = [](bool ok, const std::string& message) {
        if (!ok)
            throw ConfigError(message);
    };
    static const std::vector<std::string> experiments = {"mobile_free", "mobile_l_shape", "arm", "arm_constrained", "minigrid"};
    static const std::vector<std::string> algorithms = {"vq-elites", "map-elites", "aurora", "aurora-dagger"};
    require(std::find(experiments.begin(), experiments.end(), c.experiment) != experiments.end(),
            "unknown experiment '" + c.experiment + "'");
    require(std::find(algorithms.begin(), algorithms.end(), c.algorithm) != algorithms.end(),
            "unknown algorithm '" + c.algorithm + "'");
    require(c.env.walls == "free" || c.env.walls == "l_shape", "env.walls must be 'free' or 'l_shape'");
    require(c.env.raster_size >= 2 && c.env.raster_size <= 600, "env.raster_size must be in [2, 600]");
    require(c.env.robot_radius > 0.0 && c.env.robot_radius < 100.0, "env.robot_radius must be in (0, 100)");
    require(c.env.steps >= 0, "env.steps must be non-negative");

    const auto& a = c.algorithm_params;
    require(a.iterations >= 0, "algorithm.iterations must be non-negative");
    require(a.population > 0, "algorithm.population must be positive");
    require(a.n_update > 0, "algorithm.n_update must be positive");
    require(a.n_cooperation >= 0, "algorithm.n_cooperation must be non-negative");
    require(a.batch_size > 0, "algorithm.batch_size must be positive");
    require(a.store_capacity > 0, "algorithm.store_capacity must be positive");
    require(a.p_crossover >= 0.0 && a.p_crossover <= 1.0, "algorithm.p_crossover must be in [0,1]");
    require(a.p_mutation >= 0.0 && a.p_mutation <= 1.0, "algorithm.p_mutation must be in [0,1]");
    require(a.sigma >= 0.0, "algorithm.sigma must be non-negative");
    require(a.genome_sigma > 0.0, "algorithm.genome_sigma must be positive");
    require(a.dedup_threshold > 0.0, "algorithm.dedup_threshold must be positive");
    require(a.d_min <= a.d_init && a.d_init <= a.d_max, "algorithm.d_init must lie in [d_min, d_max]");
    require(a.k_csc >= 0.0, "algorithm.k_csc must be non-negative");
    require(a.me_bins > 0, "algorithm.me_bins must be positive");
    require(a.me_limits == "auto" || a.me_limits == "constrained" || a.me_limits == "unconstrained",
            "algorithm.me_limits must be auto, constrained or unconstrained");
    require(a.me_centroids > 0, "algorithm.me_centroids must be positive");

    const auto& m = c.model;
    require(!m.hidden.empty(), "model.hidden must not be empty");
    for (auto h : m.hidden)
        require(h > 0, "model.hidden sizes must be positive");
    require(m.latent_dim > 0, "model.latent_dim must be positive");
    require(m.codebook_size > 0, "model.codebook_size must be positive");
    require(m.beta >= 0.0, "model.beta must be non-negative");
    require(m.lr > 0.0, "model.lr must be positive");
    require(m.input_scale > 0.0, "model.input_scale must be positive");
    require(m.lr_decay > 0.0 && m.lr_decay <= 1.0, "model.lr_decay must be in (0, 1]");
    require(m.codebook_init == "kmeans" || m.codebook_init == "normal", "model.codebook_init must be 'kmeans' or 'normal'");
    require(m.decoder_output == "auto" || m.decoder_output == "sigmoid" || m.decoder_output == "linear",
            "model.decoder_output must be auto, sigmoid or linear");
    auto act = autodiff::activation_from_string(m.activation); // throws on unknown
    require(act != autodiff::Activation::softmax, "model.activation cannot be softmax");

    require(c.metrics.interval > 0, "metrics.interval must be positive");
    require(c.metrics.bins > 0, "metrics.bins must be positive");
    require(c.metrics.projection_bins > 0, "metrics.projection_bins must be positive");
    require(c.metrics.arm_eps > 0.0, "metrics.arm_eps must be positive");
    require(c.metrics.arm_k > 0 && c.metrics.arm_samples >= c.metrics.arm_k,
            "metrics.arm_samples must be at least metrics.arm_k");
}

std::string canonical_config(const ExperimentConfig& c)
{
    std::ostringstream out;
    auto kv = [&](const std::string& key, const std::string& value) { out << key << " = " << value << "\n"; };
    auto num = [&](const std::string& key, double v) { kv(key, format_real(v)); };
    auto integer = [&](const std::string& key, std::int64_t v) { kv(key, std::to_string(v)); };
    auto size = [&](const std::string& key, std::size_t v) { kv(key, std::to_string(v)); };
    auto boolean = [&](const std::string& key, bool v) { kv(key, v ? "true" : "false"); };

    kv("algorithm", c.algorithm);
    kv("experiment", c.experiment);
    kv("output_dir", c.output_dir);
    size("seed", c.seed);

    out << "\n[algorithm]\n";
    const auto& a = c.algorithm_params;
    size("batch_size", a.batch_size);
    size("bootstrap_epochs", a.bootstrap_epochs);
    size("bootstrap_evals", a.bootstrap_evals);
    num("d_init", a.d_init);
    num("d_max", a.d_max);
    num("d_min", a.d_min);
    boolean("dedup", a.dedup);
    num("dedup_threshold", a.dedup_threshold);
    size("epochs", a.epochs);
    num("genome_sigma", a.genome_sigma);
    integer("iterations", a.iterations);
    num("k_csc", a.k_csc);
    size("max_size", a.max_size);
    size("me_bins", a.me_bins);
    size("me_centroids", a.me_centroids);
    kv("me_limits", a.me_limits);
    integer("n_cooperation", a.n_cooperation);
    integer("n_update", a.n_update);
    num("p_crossover", a.p_crossover);
    num("p_mutation", a.p_mutation);
    size("population", a.population);
    num("sigma", a.sigma);
    size("store_capacity", a.store_capacity);
    size("target_size", a.target_size);

    out << "\n[env]\n";
    boolean("constrained", c.env.constrained);
    kv("map", c.env.map);
    size("raster_size", c.env.raster_size);
    num("robot_radius", c.env.robot_radius);
    integer("steps", c.env.steps);
    kv("walls", c.env.walls);

    out << "\n[metrics]\n";
    size("arm_budget", c.metrics.arm_budget);
    num("arm_eps", c.metrics.arm_eps);
    size("arm_k", c.metrics.arm_k);
    size("arm_samples", c.metrics.arm_samples);
    size("bins", c.metrics.bins);
    integer("interval", c.metrics.interval);
    size("projection_bins", c.metrics.projection_bins);

    out << "\n[model]\n";
    const auto& m = c.model;
    kv("activation", m.activation);
    num("beta", m.beta);
    boolean("bounded", m.bounded);
    kv("codebook_init", m.codebook_init);
    size("codebook_size", m.codebook_size);
    kv("decoder_output", m.decoder_output);
    {
        std::string joined;
        for (std::size_t i = 0; i < m.hidden.size(); i++)
            joined += (i ? "," : "") + std::to_string(m.hidden[i]);
        kv("hidden", joined);
    }
    num("input_scale", m.input_scale);
    size("kmeans_samples", m.kmeans_samples);
    num("lr_decay", m.lr_decay);
    size("latent_dim", m.latent_dim);
    num("lr", m.lr);
    return out.str();
}

std::uint64_t config_hash(const ExperimentConfig& c)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (char ch : canonical_config(c)) {
        h ^= static_cast<unsigned char>(ch);
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace qdforge::harness
