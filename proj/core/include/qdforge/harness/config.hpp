#ifndef QDFORGE_HARNESS_CONFIG_HPP
#define QDFORGE_HARNESS_CONFIG_HPP

#include <qdforge/qd/loop.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace qdforge::harness {

// Flat sectioned key=value experiment description. Unset keys take the
// experiment preset defaults, then algorithm-specific defaults.
struct ExperimentConfig {
    std::string experiment;              // mobile_free | mobile_l_shape | arm | arm_constrained | minigrid
    std::string algorithm = "vq-elites"; // vq-elites | map-elites | aurora | aurora-dagger
    std::uint64_t seed = 1;
    std::string output_dir;

    struct Env {
        std::string walls = "free"; // mobile preset
        std::size_t raster_size = 16;
        double robot_radius = 10.0;
        std::string map;  // gridworld ASCII map path; empty -> built-in
        int steps = 0;    // episode length override; 0 -> env default
        bool constrained = false; // arm joints 1-2 limited
    } env;

    struct Algorithm {
        std::int64_t iterations = 3000;
        std::size_t population = 128;
        std::int64_t n_update = 5;
        std::size_t epochs = 10;
        std::int64_t n_cooperation = 0;
        std::size_t bootstrap_evals = 256;
        std::size_t bootstrap_epochs = 100;
        std::size_t batch_size = 64;
        double genome_sigma = 1.0;
        double p_crossover = 0.5;
        double p_mutation = 0.2;
        double sigma = 0.05;
        std::size_t store_capacity = 50000;
        bool dedup = false;
        double dedup_threshold = 0.9;
        // unstructured container (aurora variants)
        double d_init = 1e-5;
        double d_min = 1e-5;
        double d_max = 1.0;
        double k_csc = 5e-4;
        std::size_t target_size = 0; // 0 -> codebook_size
        std::size_t max_size = 0;    // 0 -> 2 * target_size
        // hard-coded grid (map-elites)
        std::size_t me_bins = 30;          // mobile bins per dimension
        std::string me_limits = "auto";    // arm centroid source: auto|constrained|unconstrained
        std::size_t me_centroids = 400;    // arm centroid count
    } algorithm_params;

    struct Model {
        std::vector<std::size_t> hidden{64};
        std::size_t latent_dim = 2;
        std::size_t codebook_size = 2000;
        std::string activation = "gelu";
        bool bounded = true;
        std::string codebook_init = "kmeans"; // kmeans | normal
        std::size_t kmeans_samples = 0;       // 0 -> max(10K, 10000)
        double beta = 0.25;
        double lr = 7e-4;
        double input_scale = 1.0; // model input preconditioning factor
        double lr_decay = 1.0;    // per-epoch multiplicative lr decay
        std::string decoder_output = "auto"; // auto | sigmoid | linear
    } model;

    struct Metrics {
        std::int64_t interval = 10;
        std::size_t bins = 30; // mobile ground-truth bins per dimension
        std::size_t projection_bins = 8;
        double arm_eps = 0.05;
        std::size_t arm_samples = 100000;
        std::size_t arm_budget = 20000000;
        std::size_t arm_k = 400;
    } metrics;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
void validate_config(const ExperimentConfig& config);

// Full canonical form: every key, sorted sections and keys, round-trip
// float formatting. parse(canonical(c)) == c.
std::string canonical_config(const ExperimentConfig& config);
std::uint64_t config_hash(const ExperimentConfig& config);

} // namespace qdforge::harness

#endif
