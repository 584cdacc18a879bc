#include <qdforge/qd/loop.hpp>
#include <qdforge/containers/grid.hpp>
#include <qdforge/env/raster.hpp>

#include <algorithm>
#include <thread>

namespace qdforge::qd {

using autodiff::Tensor;

namespace {

    Genome random_genome(std::size_t size, double sigma, Rng& rng)
    {
        std::normal_distribution<double> dist(0.0, sigma);
        Genome g;
        g.params.resize(size);
        for (auto& p : g.params)
            p = dist(rng);
        return g;
    }

    // batch-encode raw BDs through the model; rows follow input order
    std::vector<std::vector<double>> encode_raws(const vqvae::VqVaeModel& model,
                                                 const std::vector<const std::vector<double>*>& raws)
    {
        Tensor batch = Tensor::zeros({raws.size(), model.raw_dim()});
        for (std::size_t i = 0; i < raws.size(); i++)
            std::copy(raws[i]->begin(), raws[i]->end(), batch.data.begin() + static_cast<std::ptrdiff_t>(i * model.raw_dim()));
        Tensor z = model.encode(batch);
        std::vector<std::vector<double>> out(raws.size());
        for (std::size_t i = 0; i < raws.size(); i++)
            out[i].assign(z.data.begin() + static_cast<std::ptrdiff_t>(i * model.latent_dim()),
                          z.data.begin() + static_cast<std::ptrdiff_t>((i + 1) * model.latent_dim()));
        return out;
    }

    void tally(StepReport& report, containers::InsertKind kind)
    {
        switch (kind) {
        case containers::InsertKind::inserted: report.inserted++; break;
        case containers::InsertKind::replaced: report.replaced++; break;
        case containers::InsertKind::rejected: report.rejected++; break;
        }
    }

    // Offer evaluated children to the archive in child order; encodes
    // descriptors through the current model when one is present.
    StepReport offer_batch(LoopContext& ctx, std::vector<Genome>&& genomes,
                           std::vector<env::EvalOutcome>&& outcomes,
                           const std::vector<char>& ok, bool cooperation, bool append_store)
    {
        StepReport report;
        std::vector<const std::vector<double>*> raw_ptrs;
        std::vector<std::size_t> alive;
        for (std::size_t i = 0; i < outcomes.size(); i++) {
            if (!ok[i]) {
                report.failed++;
                continue;
            }
            alive.push_back(i);
            raw_ptrs.push_back(&outcomes[i].raw_bd);
        }

        std::vector<std::vector<double>> latents;
        if (ctx.model)
            latents = encode_raws(*ctx.model, raw_ptrs);

        bool first = true;
        for (std::size_t a = 0; a < alive.size(); a++) {
            std::size_t i = alive[a];
            if (append_store)
                ctx.store->append(outcomes[i].raw_bd);
            Individual ind;
            ind.genome = std::move(genomes[i]);
            ind.fitness = outcomes[i].fitness;
            ind.raw_bd = std::move(outcomes[i].raw_bd);
            ind.latent_bd = ctx.model ? std::move(latents[a]) : outcomes[i].ground_truth_bd;
            ind.ground_truth_bd = std::move(outcomes[i].ground_truth_bd);
            if (first || ind.fitness > report.best_fitness) {
                report.best_fitness = ind.fitness;
                first = false;
            }
            tally(report, ctx.archive->insert(std::move(ind), cooperation).kind);
        }
        ctx.archive->after_batch();
        return report;
    }

} // namespace

std::vector<Genome> select(const containers::ArchiveContainer& archive, std::size_t batch,
                           Rng& rng, std::size_t genome_size, double genome_sigma)
{
    auto members = archive.members();
    std::vector<Genome> out;
    out.reserve(batch);
    if (members.empty()) {
        for (std::size_t i = 0; i < batch; i++)
            out.push_back(random_genome(genome_size, genome_sigma, rng));
        return out;
    }
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    for (std::size_t i = 0; i < batch; i++)
        out.push_back(members[pick(rng)]->genome);
    return out;
}

std::vector<Genome> variation(const std::vector<Genome>& parents, Rng& rng, const VariationConfig& cfg)
{
    std::vector<Genome> children;
    children.reserve(parents.size());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, cfg.sigma);

    for (std::size_t i = 0; i < parents.size(); i++) {
        Genome child = parents[i];
        if (cfg.p_crossover > 0.0 && unit(rng) < cfg.p_crossover) {
            const Genome& mate = parents[(i + 1) % parents.size()];
            for (std::size_t g = 0; g < child.params.size(); g++)
                if (unit(rng) < 0.5)
                    child.params[g] = mate.params[g];
        }
        if (cfg.p_mutation > 0.0) {
            for (auto& p : child.params)
                if (unit(rng) < cfg.p_mutation)
                    p += noise(rng);
        }
        children.push_back(std::move(child));
    }
    return children;
}

std::vector<env::EvalOutcome> evaluate_batch(const env::Environment& environment,
                                             const std::vector<Genome>& genomes, std::size_t workers)
{
    std::vector<env::EvalOutcome> outcomes(genomes.size());
    auto eval_range = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; i++)
            outcomes[i] = environment.evaluate(genomes[i]);
    };
    if (workers <= 1 || genomes.size() <= 1) {
        eval_range(0, genomes.size());
        return outcomes;
    }
    std::size_t n = std::min(workers, genomes.size());
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (std::size_t w = 0; w < n; w++)
        pool.emplace_back(eval_range, genomes.size() * w / n, genomes.size() * (w + 1) / n);
    for (auto& t : pool)
        t.join();
    return outcomes;
}

StepReport bootstrap(LoopContext& ctx, Rng& rng)
{
    const std::size_t k = ctx.schedule.bootstrap_evals;
    std::vector<Genome> genomes;
    genomes.reserve(k);
    for (std::size_t i = 0; i < k; i++)
        genomes.push_back(random_genome(ctx.environment->genome_size(), ctx.schedule.genome_sigma, rng));
    if (genomes.empty())
        return {};

    auto outcomes = evaluate_batch(*ctx.environment, genomes, ctx.schedule.eval_workers);
    for (const auto& o : outcomes)
        ctx.store->append(o.raw_bd);

    // warm-start on the exploration data before the first descriptors
    if (ctx.model) {
        auto view = env::training_view(*ctx.store);
        ctx.model->train_epochs(view, ctx.schedule.bootstrap_epochs, ctx.schedule.batch_size, rng);
        ctx.archive->install_centers(ctx.model->codebook());
    }

    std::vector<char> ok(outcomes.size(), 1);
    return offer_batch(ctx, std::move(genomes), std::move(outcomes), ok, ctx.schedule.n_cooperation > 0, false);
}

StepReport evolution_step(LoopContext& ctx, std::int64_t iteration, Rng& rng)
{
    auto parents = select(*ctx.archive, ctx.schedule.population, rng,
                          ctx.environment->genome_size(), ctx.schedule.genome_sigma);
    auto children = variation(parents, rng, ctx.variation);

    std::vector<env::EvalOutcome> outcomes(children.size());
    std::vector<char> ok(children.size(), 1);
    auto eval_range = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; i++) {
            try {
                outcomes[i] = ctx.environment->evaluate(children[i]);
            }
            catch (const std::exception&) {
                ok[i] = 0; // skip this child, keep the batch going
            }
        }
    };
    std::size_t workers = std::min(std::max<std::size_t>(ctx.schedule.eval_workers, 1), children.size());
    if (workers <= 1) {
        eval_range(0, children.size());
    }
    else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; w++)
            pool.emplace_back(eval_range, children.size() * w / workers, children.size() * (w + 1) / workers);
        for (auto& t : pool)
            t.join();
    }

    bool cooperation = (iteration - 1) < ctx.schedule.n_cooperation;
    return offer_batch(ctx, std::move(children), std::move(outcomes), ok, cooperation, true);
}

UpdateReport update_model_and_archive(LoopContext& ctx, Rng& rng)
{
    UpdateReport report;
    report.archive_before = ctx.archive->size();
    if (!ctx.model) {
        report.archive_after = report.archive_before;
        return report;
    }

    auto view = env::training_view(*ctx.store);
    report.training_records = view.size();
    if (!view.empty()) {
        auto stats = ctx.model->train_epochs(view, ctx.schedule.epochs, ctx.schedule.batch_size, rng);
        report.trained = !stats.epochs.empty();
        if (report.trained)
            report.final_total_loss = stats.epochs.back().loss.total;
        ctx.archive->install_centers(ctx.model->codebook());
    }

    // re-encode every member's stored raw data and reassign to the new grid
    auto members = ctx.archive->members();
    std::vector<Individual> updated;
    updated.reserve(members.size());
    std::vector<const std::vector<double>*> raws;
    raws.reserve(members.size());
    for (const auto* m : members) {
        updated.push_back(*m);
        raws.push_back(&updated.back().raw_bd);
    }
    auto latents = encode_raws(*ctx.model, raws);
    for (std::size_t i = 0; i < updated.size(); i++)
        updated[i].latent_bd = std::move(latents[i]);
    ctx.archive->reassign(std::move(updated));

    report.archive_after = ctx.archive->size();
    if (ctx.audit_updates)
        report.audit_violations = audit_archive(ctx);
    return report;
}

std::size_t audit_archive(const LoopContext& ctx)
{
    if (!ctx.model)
        return 0;
    auto* grid = dynamic_cast<const containers::GridContainer*>(ctx.archive);
    if (!grid)
        return 0;
    std::size_t violations = 0;
    for (const auto* m : ctx.archive->members()) {
        Tensor raw = Tensor::row(m->raw_bd);
        Tensor z = ctx.model->encode(raw);
        auto idx = vqvae::nearest_entries(ctx.model->codebook(), z);
        if (idx[0] != m->cell)
            violations++;
    }
    return violations;
}

RunResult run(LoopContext& ctx, const RunObserver& observer)
{
    if (!ctx.environment || !ctx.archive || !ctx.store)
        throw UsageError("run: environment, archive and store are required");
    if (!ctx.gt_grid)
        throw UsageError("run: ground-truth grid is required for metric sampling");

    RunResult result;
    auto rng = make_rng(ctx.schedule.seed);

    bootstrap(ctx, rng);
    result.evaluations += ctx.schedule.bootstrap_evals;

    auto sample = [&](std::int64_t iteration) {
        auto members = ctx.archive->members();
        auto rec = metrics::compute_metrics(iteration, members, *ctx.gt_grid);
        result.metrics.push_back(rec);
        if (observer)
            observer(rec, *ctx.archive);
    };
    sample(0);

    for (std::int64_t i = 1; i <= ctx.schedule.iterations; i++) {
        evolution_step(ctx, i, rng);
        result.evaluations += ctx.schedule.population;
        if (ctx.schedule.n_update > 0 && i % ctx.schedule.n_update == 0 && ctx.model) {
            auto update = update_model_and_archive(ctx, rng);
            result.audit_violations += update.audit_violations;
            result.updates.push_back(update);
            result.model_updates++;
        }
        if ((ctx.schedule.metrics_interval > 0 && i % ctx.schedule.metrics_interval == 0) || i == ctx.schedule.iterations)
            sample(i);
    }
    return result;
}

} // namespace qdforge::qd
