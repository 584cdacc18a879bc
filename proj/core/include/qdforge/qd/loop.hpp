#ifndef QDFORGE_QD_LOOP_HPP
#define QDFORGE_QD_LOOP_HPP

#include <qdforge/containers/container.hpp>
#include <qdforge/env/env.hpp>
#include <qdforge/metrics/metrics.hpp>
#include <qdforge/qd/experience.hpp>
#include <qdforge/qd/types.hpp>
#include <qdforge/vqvae/model.hpp>

#include <cstdint>
#include <functional>
#include <vector>

namespace qdforge::qd {

struct VariationConfig {
    double p_crossover = 0.5; // per-child probability of uniform crossover
    double p_mutation = 0.2;  // per-gene probability of Gaussian mutation
    double sigma = 0.05;
};

struct RunSchedule {
    std::int64_t iterations = 0;
    std::size_t population = 128;
    std::int64_t n_update = 5;
    std::size_t epochs = 10; // E, per model update
    std::int64_t n_cooperation = 0;
    std::size_t bootstrap_evals = 0; // K random policies
    std::size_t bootstrap_epochs = 100;
    std::size_t batch_size = 64;
    std::uint64_t seed = 0;
    double genome_sigma = 1.0; // stddev of fresh random genomes
    std::size_t eval_workers = 1;
    std::int64_t metrics_interval = 10;
};

struct StepReport {
    std::size_t inserted = 0;
    std::size_t replaced = 0;
    std::size_t rejected = 0;
    std::size_t failed = 0;
    double best_fitness = 0.0;
};

struct UpdateReport {
    bool trained = false;
    std::size_t training_records = 0;
    double final_total_loss = 0.0;
    std::size_t archive_before = 0;
    std::size_t archive_after = 0;
    std::size_t audit_violations = 0;
};

struct RunResult {
    std::vector<metrics::MetricsRecord> metrics;
    std::vector<UpdateReport> updates;
    std::size_t model_updates = 0;
    std::size_t audit_violations = 0;
    std::size_t evaluations = 0;
};

// Wiring for one run. `model` may be null: descriptors then fall back to
// the ground-truth BD (hard-coded MAP-Elites) and model updates are skipped.
struct LoopContext {
    const env::Environment* environment = nullptr;
    containers::ArchiveContainer* archive = nullptr;
    vqvae::VqVaeModel* model = nullptr;
    ExperienceStore* store = nullptr;
    const metrics::GroundTruthGrid* gt_grid = nullptr;
    RunSchedule schedule;
    VariationConfig variation;
    bool audit_updates = true;
};

// Uniform-with-replacement parent draws; an empty archive falls back to
// fresh random genomes.
std::vector<Genome> select(const containers::ArchiveContainer& archive, std::size_t batch,
                           Rng& rng, std::size_t genome_size, double genome_sigma);

// Per child: uniform crossover of two parents with probability p_crossover
// (per-gene swap chance 0.5), then per-gene Gaussian mutation.
std::vector<Genome> variation(const std::vector<Genome>& parents, Rng& rng, const VariationConfig& cfg);

std::vector<env::EvalOutcome> evaluate_batch(const env::Environment& environment,
                                             const std::vector<Genome>& genomes, std::size_t workers);

StepReport bootstrap(LoopContext& ctx, Rng& rng);
StepReport evolution_step(LoopContext& ctx, std::int64_t iteration, Rng& rng);
UpdateReport update_model_and_archive(LoopContext& ctx, Rng& rng);

using RunObserver = std::function<void(const metrics::MetricsRecord&, const containers::ArchiveContainer&)>;

RunResult run(LoopContext& ctx, const RunObserver& observer = {});

// Checks that every member sits in the cell its re-encoded raw BD maps to;
// returns the number of violations (0 when the archive is consistent).
std::size_t audit_archive(const LoopContext& ctx);

} // namespace qdforge::qd

#endif
