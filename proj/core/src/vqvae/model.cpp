#include <qdforge/vqvae/model.hpp>
#include <qdforge/vqvae/kmeans.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qdforge::vqvae {

using autodiff::Tape;
using autodiff::kernels::activation_forward;
using autodiff::kernels::affine;

std::vector<int> nearest_entries(const Tensor& codebook, const Tensor& z_e)
{
    const std::size_t k = codebook.rows();
    const std::size_t dim = codebook.cols();
    if (k == 0 || codebook.numel() == 0)
        throw UsageError("quantize: empty codebook");
    if (z_e.cols() != dim)
        throw UsageError("quantize: latent axis " + std::to_string(z_e.cols()) + " does not match codebook axis " + std::to_string(dim));

    std::vector<int> indices(z_e.rows());
    for (std::size_t b = 0; b < z_e.rows(); b++) {
        double best = std::numeric_limits<double>::infinity();
        int best_i = 0;
        for (std::size_t i = 0; i < k; i++) {
            double d = 0.0;
            for (std::size_t c = 0; c < dim; c++) {
                double diff = z_e.at(b, c) - codebook.at(i, c);
                d += diff * diff;
            }
            if (d < best) {
                best = d;
                best_i = static_cast<int>(i);
            }
        }
        indices[b] = best_i;
    }
    return indices;
}

std::pair<Tensor, std::vector<int>> quantize(const Tensor& codebook, const Tensor& z_e)
{
    auto indices = nearest_entries(codebook, z_e);
    Tensor z_q = Tensor::zeros({z_e.rows(), codebook.cols()});
    for (std::size_t b = 0; b < indices.size(); b++)
        for (std::size_t c = 0; c < codebook.cols(); c++)
            z_q.at(b, c) = codebook.at(static_cast<std::size_t>(indices[b]), c);
    return {std::move(z_q), std::move(indices)};
}

void Mlp::build(std::vector<std::size_t> layer_sizes, Activation hidden,
                std::optional<Activation> output, std::uint64_t seed)
{
    if (layer_sizes.size() < 2)
        throw ConfigError("mlp needs at least input and output sizes");
    sizes = std::move(layer_sizes);
    hidden_act = hidden;
    output_act = output;
    weights.clear();
    biases.clear();
    for (std::size_t l = 0; l + 1 < sizes.size(); l++) {
        Tensor w = Tensor::zeros({sizes[l], sizes[l + 1]});
        autodiff::glorot_init(w, sizes[l], sizes[l + 1], splitmix64(seed + l));
        weights.push_back(std::move(w));
        biases.push_back(Tensor::zeros({sizes[l + 1]}));
    }
}

Tensor Mlp::forward(const Tensor& x) const
{
    if (x.cols() != sizes.front())
        throw UsageError("mlp: input axis " + std::to_string(x.cols()) + " does not match layer axis " + std::to_string(sizes.front()));
    Tensor cur = x;
    for (std::size_t l = 0; l < weights.size(); l++) {
        Tensor next = Tensor::zeros({cur.rows(), sizes[l + 1]});
        affine(cur.data.data(), cur.rows(), cur.cols(), weights[l].data.data(), sizes[l + 1], biases[l].data.data(), next.data.data());
        bool last = (l + 1 == weights.size());
        std::optional<Activation> act = last ? output_act : std::optional<Activation>(hidden_act);
        if (act) {
            if (*act == Activation::softmax)
                autodiff::kernels::softmax_rows(next.data.data(), next.rows(), next.cols(), next.data.data());
            else
                activation_forward(*act, next.data.data(), next.numel(), next.data.data());
        }
        cur = std::move(next);
    }
    return cur;
}

Tape::Var Mlp::forward(Tape& tape, Tape::Var x)
{
    Tape::Var cur = x;
    for (std::size_t l = 0; l < weights.size(); l++) {
        cur = tape.affine(cur, tape.leaf(&weights[l]), tape.leaf(&biases[l]));
        bool last = (l + 1 == weights.size());
        std::optional<Activation> act = last ? output_act : std::optional<Activation>(hidden_act);
        if (act)
            cur = tape.activation(*act, cur);
    }
    return cur;
}

std::vector<Tensor*> Mlp::parameters()
{
    std::vector<Tensor*> out;
    for (std::size_t l = 0; l < weights.size(); l++) {
        out.push_back(&weights[l]);
        out.push_back(&biases[l]);
    }
    return out;
}

std::size_t Mlp::parameter_count() const
{
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); l++)
        n += weights[l].numel() + biases[l].numel();
    return n;
}

VqVaeModel::VqVaeModel(VqVaeOptions opts) : _opts(std::move(opts))
{
    if (_opts.raw_dim == 0 || _opts.latent_dim == 0 || _opts.codebook_size == 0)
        throw ConfigError("vqvae: raw_dim, latent_dim and codebook_size must be positive");

    std::vector<std::size_t> enc{_opts.raw_dim};
    enc.insert(enc.end(), _opts.hidden.begin(), _opts.hidden.end());
    enc.push_back(_opts.latent_dim);
    std::vector<std::size_t> dec{_opts.latent_dim};
    if (_opts.decoder_hidden.empty())
        dec.insert(dec.end(), _opts.hidden.rbegin(), _opts.hidden.rend());
    else
        dec.insert(dec.end(), _opts.decoder_hidden.begin(), _opts.decoder_hidden.end());
    dec.push_back(_opts.raw_dim);

    _encoder.build(enc, _opts.hidden_act,
                   _opts.bounded ? std::optional<Activation>(Activation::tanh) : std::nullopt,
                   splitmix64(_opts.seed ^ 0x656e63ULL));
    _decoder.build(dec, _opts.hidden_act,
                   _opts.sigmoid_output ? std::optional<Activation>(Activation::sigmoid) : std::nullopt,
                   splitmix64(_opts.seed ^ 0x646563ULL));

    if (_opts.codebook_init == CodebookInit::kmeans) {
        std::size_t samples = _opts.kmeans_samples;
        if (samples == 0)
            samples = std::max<std::size_t>(10 * _opts.codebook_size, 10000);
        _codebook = init_codebook_kmeans(_opts.codebook_size, _opts.latent_dim, samples, _opts.seed);
    }
    else {
        _codebook = Tensor::zeros({_opts.codebook_size, _opts.latent_dim});
        auto rng = make_rng(_opts.seed, 0x6e6f726dULL);
        std::normal_distribution<double> dist(0.0, 1.0);
        for (auto& v : _codebook.data)
            v = dist(rng);
    }
    _optimizer.lr = _opts.lr;
}

Tensor VqVaeModel::encode(const Tensor& raw) const
{
    if (raw.cols() != _opts.raw_dim)
        throw UsageError("encode: raw axis " + std::to_string(raw.cols()) + " does not match model input " + std::to_string(_opts.raw_dim));
    return _encoder.forward(_scale_input(raw));
}

Tensor VqVaeModel::_scale_input(const Tensor& raw) const
{
    if (_opts.input_scale == 1.0)
        return raw;
    Tensor scaled = raw;
    for (auto& v : scaled.data)
        v *= _opts.input_scale;
    return scaled;
}

Tensor VqVaeModel::decode(const Tensor& latent) const
{
    return _decoder.forward(latent);
}

Tensor VqVaeModel::reconstruct(const Tensor& raw) const
{
    Tensor z_e = encode(raw);
    auto [z_q, idx] = quantize(_codebook, z_e);
    // mirror the straight-through forward exactly: z_e + (z_q - z_e)
    Tensor st = z_e;
    for (std::size_t i = 0; i < st.numel(); i++)
        st.data[i] = z_e.data[i] + (z_q.data[i] - z_e.data[i]);
    Tensor out = _decoder.forward(st);
    for (auto& v : out.data)
        v /= _opts.input_scale;
    return out;
}

Tensor VqVaeModel::decode_codebook() const
{
    Tensor out = _decoder.forward(_codebook);
    for (auto& v : out.data)
        v /= _opts.input_scale;
    return out;
}

VqVaeModel::LossGraph VqVaeModel::vq_loss(const Tensor& raw_batch)
{
    if (raw_batch.rows() == 0)
        throw UsageError("vq_loss: empty batch");
    LossGraph g;
    Tape& t = g.tape;
    Tape::Var x = t.constant(_scale_input(raw_batch));
    g.z_e = _encoder.forward(t, x);
    g.indices = nearest_entries(_codebook, t.value(g.z_e));
    Tape::Var cb = t.leaf(&_codebook);
    g.z_q = t.gather_rows(cb, g.indices);
    g.straight_through = t.add(g.z_e, t.stop_gradient(t.sub(g.z_q, g.z_e)));
    g.reconstruction = _decoder.forward(t, g.straight_through);
    g.recon = t.mse(g.reconstruction, x);
    g.codebook_loss = t.mse(t.stop_gradient(g.z_e), g.z_q);
    g.commit = t.scale(t.mse(g.z_e, t.stop_gradient(g.z_q)), _opts.beta);
    g.total = t.add(t.add(g.recon, g.codebook_loss), g.commit);

    g.report.recon = t.value(g.recon).data[0];
    g.report.codebook_loss = t.value(g.codebook_loss).data[0];
    g.report.commit = t.value(g.commit).data[0];
    g.report.total = g.report.recon + g.report.codebook_loss + g.report.commit;
    return g;
}

Tensor VqVaeModel::_batch_tensor(std::span<const std::vector<double>* const> data,
                                 std::span<const std::size_t> idx) const
{
    Tensor batch = Tensor::zeros({idx.size(), _opts.raw_dim});
    for (std::size_t b = 0; b < idx.size(); b++) {
        const auto& rec = *data[idx[b]];
        if (rec.size() != _opts.raw_dim)
            throw UsageError("train: record size " + std::to_string(rec.size()) + " does not match model input " + std::to_string(_opts.raw_dim));
        std::copy(rec.begin(), rec.end(), batch.data.begin() + static_cast<std::ptrdiff_t>(b * _opts.raw_dim));
    }
    return batch;
}

void VqVaeModel::_check_codebook_bounds() const
{
    if (!_opts.bounded)
        return;
    for (double v : _codebook.data)
        if (v < -1.5 || v > 1.5)
            throw UsageError("codebook entry " + std::to_string(v) + " left [-1.5, 1.5] during bounded training");
}

TrainResult VqVaeModel::train_epochs(std::span<const std::vector<double>* const> data,
                                     std::size_t epochs, std::size_t batch_size, Rng& rng)
{
    TrainResult result;
    if (data.empty()) {
        result.skipped_empty = true;
        return result;
    }
    if (batch_size == 0)
        throw ConfigError("train: batch_size must be positive");

    auto params = parameters();
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t e = 0; e < epochs; e++) {
        if (_opts.lr_decay != 1.0)
            _optimizer.lr = _opts.lr * std::pow(_opts.lr_decay, static_cast<double>(_epochs_trained));
        std::shuffle(order.begin(), order.end(), rng);
        EpochStats stats;
        double recon = 0.0, cb = 0.0, commit = 0.0;
        std::vector<char> used(_opts.codebook_size, 0);
        std::size_t seen = 0;
        for (std::size_t start = 0; start < order.size(); start += batch_size) {
            std::size_t len = std::min(batch_size, order.size() - start);
            Tensor batch = _batch_tensor(data, std::span<const std::size_t>(order).subspan(start, len));
            LossGraph g = vq_loss(batch);
            g.tape.backward(g.total);
            adam_step(_optimizer, params);
            double w = static_cast<double>(len);
            recon += g.report.recon * w;
            cb += g.report.codebook_loss * w;
            commit += g.report.commit * w;
            seen += len;
            for (int i : g.indices)
                used[static_cast<std::size_t>(i)] = 1;
        }
        stats.loss.recon = recon / static_cast<double>(seen);
        stats.loss.codebook_loss = cb / static_cast<double>(seen);
        stats.loss.commit = commit / static_cast<double>(seen);
        stats.loss.total = stats.loss.recon + stats.loss.codebook_loss + stats.loss.commit;
        stats.unused_entries = static_cast<std::size_t>(std::count(used.begin(), used.end(), 0));
        result.epochs.push_back(stats);
        _epochs_trained++;
        _check_codebook_bounds();
    }
    return result;
}

std::vector<Tensor*> VqVaeModel::parameters()
{
    auto out = _encoder.parameters();
    auto dec = _decoder.parameters();
    out.insert(out.end(), dec.begin(), dec.end());
    out.push_back(&_codebook);
    return out;
}

std::vector<double> VqVaeModel::flatten_parameters() const
{
    std::vector<double> flat;
    auto& self = const_cast<VqVaeModel&>(*this);
    for (Tensor* t : self.parameters())
        flat.insert(flat.end(), t->data.begin(), t->data.end());
    return flat;
}

void VqVaeModel::load_parameters(std::span<const double> flat)
{
    std::size_t off = 0;
    for (Tensor* t : parameters()) {
        if (off + t->numel() > flat.size())
            throw UsageError("load_parameters: flat vector too short");
        std::copy(flat.begin() + static_cast<std::ptrdiff_t>(off),
                  flat.begin() + static_cast<std::ptrdiff_t>(off + t->numel()), t->data.begin());
        off += t->numel();
    }
    if (off != flat.size())
        throw UsageError("load_parameters: flat vector has " + std::to_string(flat.size()) + " values, expected " + std::to_string(off));
}

} // namespace qdforge::vqvae
