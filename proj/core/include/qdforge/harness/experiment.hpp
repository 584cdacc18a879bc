#ifndef QDFORGE_HARNESS_EXPERIMENT_HPP
#define QDFORGE_HARNESS_EXPERIMENT_HPP

#include <qdforge/harness/config.hpp>
#include <qdforge/qd/loop.hpp>

#include <array>
#include <filesystem>
#include <memory>

namespace qdforge::harness {

// Materialized pieces of one experiment, owned together so the loop context
// stays valid for the lifetime of the setup.
struct ExperimentSetup {
    std::unique_ptr<env::Environment> environment;
    std::unique_ptr<containers::ArchiveContainer> archive;
    std::unique_ptr<vqvae::VqVaeModel> model; // null for map-elites
    std::unique_ptr<qd::ExperienceStore> store;
    metrics::GroundTruthGrid gt_grid;
    std::array<double, 2> projection_lo{}, projection_hi{}; // elite-grid view bounds
    qd::RunSchedule schedule;
    qd::VariationConfig variation;

    qd::LoopContext context();
};

struct RunOptions {
    std::filesystem::path out_dir; // empty -> <output root>/<experiment>-<algorithm>-seed<seed>
    std::size_t eval_workers = 1;
    const metrics::GroundTruthGrid* shared_gt = nullptr;           // reuse an expensive metrics grid
    const autodiff::Tensor* shared_me_centroids = nullptr;         // reuse map-elites arm centroids
    qd::RunObserver observer;
    bool write_artifacts = true;
};

struct RunArtifacts {
    std::filesystem::path dir;
    std::filesystem::path metrics_csv;
    std::filesystem::path archive_snapshot;
    std::filesystem::path model_checkpoint; // empty if no model
    std::filesystem::path manifest;
    std::filesystem::path elite_grid_svg;
    std::filesystem::path decoded_centers_svg; // empty when unsupported
    qd::RunResult result;
};

ExperimentSetup build_setup(const ExperimentConfig& config, const RunOptions& options = {});
RunArtifacts run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

// Re-render an SVG from an existing artifact directory.
std::filesystem::path render_artifact(const std::filesystem::path& run_dir, const std::string& what,
                                      const std::filesystem::path& out_file = {});

std::filesystem::path default_output_root(const ExperimentConfig& config);

} // namespace qdforge::harness

#endif
