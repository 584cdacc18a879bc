#ifndef QDFORGE_VQVAE_MODEL_HPP
#define QDFORGE_VQVAE_MODEL_HPP

#include <qdforge/autodiff/adam.hpp>
#include <qdforge/autodiff/engine.hpp>
#include <qdforge/common.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace qdforge::vqvae {

using autodiff::Activation;
using autodiff::Tensor;

// Nearest-entry quantization: indices[b] = argmin_i ||z_e[b] - c_i||^2 with
// ties broken to the lowest index; z_q[b] is a copy of the chosen entry.
std::pair<Tensor, std::vector<int>> quantize(const Tensor& codebook, const Tensor& z_e);
std::vector<int> nearest_entries(const Tensor& codebook, const Tensor& z_e);

struct VqLossReport {
    double recon = 0.0;
    double codebook_loss = 0.0;
    double commit = 0.0;
    double total = 0.0;
};

struct EpochStats {
    VqLossReport loss;
    std::size_t unused_entries = 0;
};

struct TrainResult {
    std::vector<EpochStats> epochs;
    bool skipped_empty = false;
};

enum class CodebookInit { kmeans, normal };

struct VqVaeOptions {
    std::size_t raw_dim = 0;
    std::size_t latent_dim = 0;
    std::size_t codebook_size = 0;
    std::vector<std::size_t> hidden; // encoder hidden sizes
    std::vector<std::size_t> decoder_hidden; // empty -> mirror of hidden
    Activation hidden_act = Activation::gelu;
    bool bounded = true;          // tanh on the encoder output
    bool sigmoid_output = false;  // squash decoder output to [0,1] (raster data)
    double beta = 0.25;
    double lr = 7e-4;
    // fixed input preconditioning: the model sees input_scale * raw. Weak
    // sparse inputs (downsampled rasters) need this to produce a usable
    // latent spread from a fully connected encoder.
    double input_scale = 1.0;
    // multiplicative learning-rate decay per epoch (1 = constant); lets the
    // model settle so late grid updates stop reshuffling the archive
    double lr_decay = 1.0;
    CodebookInit codebook_init = CodebookInit::kmeans;
    std::size_t kmeans_samples = 0; // 0 -> max(10*K, 10000)
    std::uint64_t seed = 0;
};

// Fully connected stack; parameters live here so tapes can bind leaves.
struct Mlp {
    std::vector<std::size_t> sizes;
    Activation hidden_act = Activation::gelu;
    std::optional<Activation> output_act;
    std::vector<Tensor> weights;
    std::vector<Tensor> biases;

    void build(std::vector<std::size_t> layer_sizes, Activation hidden,
               std::optional<Activation> output, std::uint64_t seed);
    Tensor forward(const Tensor& x) const;
    autodiff::Tape::Var forward(autodiff::Tape& tape, autodiff::Tape::Var x);
    std::vector<Tensor*> parameters();
    std::size_t parameter_count() const;
};

class VqVaeModel {
public:
    explicit VqVaeModel(VqVaeOptions opts);

    const VqVaeOptions& options() const { return _opts; }
    const Tensor& codebook() const { return _codebook; }
    Tensor& codebook() { return _codebook; }
    std::size_t latent_dim() const { return _opts.latent_dim; }
    std::size_t raw_dim() const { return _opts.raw_dim; }

    // B x raw -> B x D, no tape; bounded models produce values in (-1,1).
    Tensor encode(const Tensor& raw) const;
    Tensor decode(const Tensor& latent) const;
    // decoder(straight-through latent) for a raw batch
    Tensor reconstruct(const Tensor& raw) const;
    // decoder applied to every codebook entry, one row per entry
    Tensor decode_codebook() const;

    struct LossGraph {
        autodiff::Tape tape;
        autodiff::Tape::Var z_e, z_q, straight_through, reconstruction;
        autodiff::Tape::Var recon, codebook_loss, commit, total;
        std::vector<int> indices;
        VqLossReport report;
    };
    // Builds the full loss graph for one batch (Eqs. of the combined
    // reconstruction/codebook/commitment objective); caller may backward().
    LossGraph vq_loss(const Tensor& raw_batch);

    // Shuffled minibatch training; one stats entry per epoch. Empty data is
    // a no-op with `skipped_empty` set.
    TrainResult train_epochs(std::span<const std::vector<double>* const> data,
                             std::size_t epochs, std::size_t batch_size, Rng& rng);

    std::vector<Tensor*> parameters();
    std::vector<double> flatten_parameters() const;
    void load_parameters(std::span<const double> flat);

private:
    VqVaeOptions _opts;
    Mlp _encoder;
    Mlp _decoder;
    Tensor _codebook;
    autodiff::AdamState _optimizer;
    std::size_t _epochs_trained = 0;

    Tensor _batch_tensor(std::span<const std::vector<double>* const> data,
                         std::span<const std::size_t> idx) const;
    Tensor _scale_input(const Tensor& raw) const;
    void _check_codebook_bounds() const;
};

} // namespace qdforge::vqvae

#endif
