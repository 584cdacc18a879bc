#include <qdforge/autodiff/engine.hpp>
#include <qdforge/common.hpp>

#include <Eigen/Core>

#include <cmath>

namespace qdforge::autodiff {

namespace {
    using MatMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
    using MutMatMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

    constexpr double kInvSqrt2 = 0.7071067811865475244;
    constexpr double kInvSqrt2Pi = 0.3989422804014326779;

    double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
} // namespace

Activation activation_from_string(const std::string& name)
{
    if (name == "relu") return Activation::relu;
    if (name == "gelu") return Activation::gelu;
    if (name == "silu") return Activation::silu;
    if (name == "tanh") return Activation::tanh;
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "gaussian") return Activation::gaussian;
    if (name == "softmax") return Activation::softmax;
    throw ConfigError("unknown activation kind '" + name + "'");
}

std::string to_string(Activation a)
{
    switch (a) {
    case Activation::relu: return "relu";
    case Activation::gelu: return "gelu";
    case Activation::silu: return "silu";
    case Activation::tanh: return "tanh";
    case Activation::sigmoid: return "sigmoid";
    case Activation::gaussian: return "gaussian";
    case Activation::softmax: return "softmax";
    }
    throw ConfigError("unknown activation kind");
}

namespace kernels {

    void affine(const double* x, std::size_t batch, std::size_t in_dim,
                const double* w, std::size_t out_dim, const double* bias, double* out)
    {
        MatMap xm(x, static_cast<Eigen::Index>(batch), static_cast<Eigen::Index>(in_dim));
        MatMap wm(w, static_cast<Eigen::Index>(in_dim), static_cast<Eigen::Index>(out_dim));
        MutMatMap om(out, static_cast<Eigen::Index>(batch), static_cast<Eigen::Index>(out_dim));
        om.noalias() = xm * wm;
        if (bias) {
            Eigen::Map<const Eigen::RowVectorXd> bm(bias, static_cast<Eigen::Index>(out_dim));
            om.rowwise() += bm;
        }
    }

    void activation_forward(Activation a, const double* x, std::size_t n, double* out)
    {
        switch (a) {
        case Activation::relu:
            for (std::size_t i = 0; i < n; i++)
                out[i] = x[i] > 0.0 ? x[i] : 0.0;
            return;
        case Activation::gelu:
            for (std::size_t i = 0; i < n; i++)
                out[i] = 0.5 * x[i] * (1.0 + std::erf(x[i] * kInvSqrt2));
            return;
        case Activation::silu:
            for (std::size_t i = 0; i < n; i++)
                out[i] = x[i] * sigmoid(x[i]);
            return;
        case Activation::tanh:
            for (std::size_t i = 0; i < n; i++)
                out[i] = std::tanh(x[i]);
            return;
        case Activation::sigmoid:
            for (std::size_t i = 0; i < n; i++)
                out[i] = sigmoid(x[i]);
            return;
        case Activation::gaussian:
            for (std::size_t i = 0; i < n; i++)
                out[i] = std::exp(-x[i] * x[i]);
            return;
        case Activation::softmax:
            throw UsageError("softmax needs row structure; use softmax_rows");
        }
    }

    void softmax_rows(const double* x, std::size_t rows, std::size_t cols, double* out)
    {
        for (std::size_t r = 0; r < rows; r++) {
            const double* xr = x + r * cols;
            double* or_ = out + r * cols;
            double mx = xr[0];
            for (std::size_t c = 1; c < cols; c++)
                mx = std::max(mx, xr[c]);
            double sum = 0.0;
            for (std::size_t c = 0; c < cols; c++) {
                or_[c] = std::exp(xr[c] - mx);
                sum += or_[c];
            }
            for (std::size_t c = 0; c < cols; c++)
                or_[c] /= sum;
        }
    }

    double activation_grad(Activation a, double x, double y)
    {
        switch (a) {
        case Activation::relu: return x > 0.0 ? 1.0 : 0.0;
        case Activation::gelu: return 0.5 * (1.0 + std::erf(x * kInvSqrt2)) + x * kInvSqrt2Pi * std::exp(-0.5 * x * x);
        case Activation::silu: {
            double s = sigmoid(x);
            return s * (1.0 + x * (1.0 - s));
        }
        case Activation::tanh: return 1.0 - y * y;
        case Activation::sigmoid: return y * (1.0 - y);
        case Activation::gaussian: return -2.0 * x * y;
        case Activation::softmax: throw UsageError("softmax gradient is not elementwise");
        }
        return 0.0;
    }

} // namespace kernels

int Tape::_push(Node n)
{
    n.grad.assign(n.op == Op::leaf ? n.external->data.size() : n.value.data.size(), 0.0);
    _nodes.push_back(std::move(n));
    return static_cast<int>(_nodes.size()) - 1;
}

const Tensor& Tape::_val(int id) const
{
    const Node& n = _nodes[static_cast<std::size_t>(id)];
    return n.op == Op::leaf ? *n.external : n.value;
}

Tape::Var Tape::leaf(Tensor* param)
{
    if (!param)
        throw UsageError("leaf requires parameter storage");
    Node n;
    n.op = Op::leaf;
    n.external = param;
    return {_push(std::move(n))};
}

Tape::Var Tape::constant(Tensor value)
{
    Node n;
    n.op = Op::constant;
    n.value = std::move(value);
    return {_push(std::move(n))};
}

Tape::Var Tape::affine(Var x, Var w, Var b)
{
    const Tensor& xv = _val(x.id);
    const Tensor& wv = _val(w.id);
    const Tensor& bv = _val(b.id);
    if (xv.cols() != wv.rows())
        throw UsageError("affine: input axis " + std::to_string(xv.cols()) + " does not match weight axis " + std::to_string(wv.rows()));
    if (bv.numel() != wv.cols())
        throw UsageError("affine: bias axis " + std::to_string(bv.numel()) + " does not match weight axis " + std::to_string(wv.cols()));

    Node n;
    n.op = Op::affine;
    n.in = {x.id, w.id, b.id};
    n.value = Tensor::zeros({xv.rows(), wv.cols()});
    kernels::affine(xv.data.data(), xv.rows(), xv.cols(), wv.data.data(), wv.cols(), bv.data.data(), n.value.data.data());
    return {_push(std::move(n))};
}

Tape::Var Tape::activation(Activation a, Var x)
{
    const Tensor& xv = _val(x.id);
    Node n;
    n.op = Op::activation;
    n.act = a;
    n.in = {x.id};
    n.value = Tensor::zeros(xv.shape);
    if (a == Activation::softmax)
        kernels::softmax_rows(xv.data.data(), xv.rows(), xv.cols(), n.value.data.data());
    else
        kernels::activation_forward(a, xv.data.data(), xv.numel(), n.value.data.data());
    return {_push(std::move(n))};
}

Tape::Var Tape::mse(Var a, Var b)
{
    const Tensor& av = _val(a.id);
    const Tensor& bv = _val(b.id);
    if (!av.same_shape(bv))
        throw UsageError("mse: shape " + av.shape_str() + " does not match " + bv.shape_str());
    double acc = 0.0;
    for (std::size_t i = 0; i < av.numel(); i++) {
        double d = av.data[i] - bv.data[i];
        acc += d * d;
    }
    Node n;
    n.op = Op::mse;
    n.in = {a.id, b.id};
    n.value = Tensor::scalar(acc / static_cast<double>(av.numel()));
    return {_push(std::move(n))};
}

Tape::Var Tape::stop_gradient(Var x)
{
    Node n;
    n.op = Op::stop_grad;
    n.in = {x.id};
    n.value = _val(x.id);
    n.value.grad.clear();
    return {_push(std::move(n))};
}

Tape::Var Tape::add(Var a, Var b)
{
    const Tensor& av = _val(a.id);
    const Tensor& bv = _val(b.id);
    if (!av.same_shape(bv))
        throw UsageError("add: shape " + av.shape_str() + " does not match " + bv.shape_str());
    Node n;
    n.op = Op::add;
    n.in = {a.id, b.id};
    n.value = av;
    for (std::size_t i = 0; i < bv.numel(); i++)
        n.value.data[i] += bv.data[i];
    return {_push(std::move(n))};
}

Tape::Var Tape::sub(Var a, Var b)
{
    const Tensor& av = _val(a.id);
    const Tensor& bv = _val(b.id);
    if (!av.same_shape(bv))
        throw UsageError("sub: shape " + av.shape_str() + " does not match " + bv.shape_str());
    Node n;
    n.op = Op::sub;
    n.in = {a.id, b.id};
    n.value = av;
    for (std::size_t i = 0; i < bv.numel(); i++)
        n.value.data[i] -= bv.data[i];
    return {_push(std::move(n))};
}

Tape::Var Tape::scale(Var x, double c)
{
    Node n;
    n.op = Op::scale;
    n.scalar = c;
    n.in = {x.id};
    n.value = _val(x.id);
    for (auto& v : n.value.data)
        v *= c;
    return {_push(std::move(n))};
}

Tape::Var Tape::gather_rows(Var table, std::vector<int> idx)
{
    const Tensor& tv = _val(table.id);
    std::size_t dim = tv.cols();
    Node n;
    n.op = Op::gather;
    n.in = {table.id};
    n.value = Tensor::zeros({idx.size(), dim});
    for (std::size_t b = 0; b < idx.size(); b++) {
        if (idx[b] < 0 || static_cast<std::size_t>(idx[b]) >= tv.rows())
            throw UsageError("gather_rows: index " + std::to_string(idx[b]) + " out of range");
        for (std::size_t c = 0; c < dim; c++)
            n.value.data[b * dim + c] = tv.at(static_cast<std::size_t>(idx[b]), c);
    }
    n.indices = std::move(idx);
    return {_push(std::move(n))};
}

const Tensor& Tape::value(Var v) const
{
    return _val(v.id);
}

const std::vector<double>& Tape::grad(Var v) const
{
    return _nodes[static_cast<std::size_t>(v.id)].grad;
}

void Tape::backward(Var loss)
{
    if (!loss.valid() || static_cast<std::size_t>(loss.id) >= _nodes.size())
        throw UsageError("backward: invalid loss node");
    if (_val(loss.id).numel() != 1)
        throw UsageError("backward: loss must be scalar, got shape " + _val(loss.id).shape_str());

    for (auto& n : _nodes) {
        std::fill(n.grad.begin(), n.grad.end(), 0.0);
        if (n.op == Op::leaf)
            n.external->zero_grad();
    }
    _nodes[static_cast<std::size_t>(loss.id)].grad[0] = 1.0;

    for (int id = loss.id; id >= 0; id--)
        _backward_node(_nodes[static_cast<std::size_t>(id)]);

    for (auto& n : _nodes)
        if (n.op == Op::leaf)
            n.external->grad = n.grad;
}

void Tape::_backward_node(Node& n)
{
    switch (n.op) {
    case Op::leaf:
    case Op::constant:
    case Op::stop_grad:
        return;
    case Op::affine: {
        const Tensor& x = _val(n.in[0]);
        const Tensor& w = _val(n.in[1]);
        std::size_t B = x.rows(), I = x.cols(), O = w.cols();
        MatMap gm(n.grad.data(), static_cast<Eigen::Index>(B), static_cast<Eigen::Index>(O));
        MatMap xm(x.data.data(), static_cast<Eigen::Index>(B), static_cast<Eigen::Index>(I));
        MatMap wm(w.data.data(), static_cast<Eigen::Index>(I), static_cast<Eigen::Index>(O));
        MutMatMap gx(_nodes[static_cast<std::size_t>(n.in[0])].grad.data(), static_cast<Eigen::Index>(B), static_cast<Eigen::Index>(I));
        MutMatMap gw(_nodes[static_cast<std::size_t>(n.in[1])].grad.data(), static_cast<Eigen::Index>(I), static_cast<Eigen::Index>(O));
        gx.noalias() += gm * wm.transpose();
        gw.noalias() += xm.transpose() * gm;
        auto& gb = _nodes[static_cast<std::size_t>(n.in[2])].grad;
        for (std::size_t b = 0; b < B; b++)
            for (std::size_t o = 0; o < O; o++)
                gb[o] += n.grad[b * O + o];
        return;
    }
    case Op::activation: {
        const Tensor& x = _val(n.in[0]);
        auto& gx = _nodes[static_cast<std::size_t>(n.in[0])].grad;
        if (n.act == Activation::softmax) {
            std::size_t R = x.rows(), C = x.cols();
            for (std::size_t r = 0; r < R; r++) {
                const double* s = n.value.data.data() + r * C;
                const double* g = n.grad.data() + r * C;
                double dot = 0.0;
                for (std::size_t c = 0; c < C; c++)
                    dot += g[c] * s[c];
                for (std::size_t c = 0; c < C; c++)
                    gx[r * C + c] += s[c] * (g[c] - dot);
            }
        }
        else {
            for (std::size_t i = 0; i < x.numel(); i++)
                gx[i] += n.grad[i] * kernels::activation_grad(n.act, x.data[i], n.value.data[i]);
        }
        return;
    }
    case Op::mse: {
        const Tensor& a = _val(n.in[0]);
        const Tensor& b = _val(n.in[1]);
        auto& ga = _nodes[static_cast<std::size_t>(n.in[0])].grad;
        auto& gb = _nodes[static_cast<std::size_t>(n.in[1])].grad;
        double scale = 2.0 * n.grad[0] / static_cast<double>(a.numel());
        for (std::size_t i = 0; i < a.numel(); i++) {
            double d = scale * (a.data[i] - b.data[i]);
            ga[i] += d;
            gb[i] -= d;
        }
        return;
    }
    case Op::add: {
        auto& ga = _nodes[static_cast<std::size_t>(n.in[0])].grad;
        auto& gb = _nodes[static_cast<std::size_t>(n.in[1])].grad;
        for (std::size_t i = 0; i < n.grad.size(); i++) {
            ga[i] += n.grad[i];
            gb[i] += n.grad[i];
        }
        return;
    }
    case Op::sub: {
        auto& ga = _nodes[static_cast<std::size_t>(n.in[0])].grad;
        auto& gb = _nodes[static_cast<std::size_t>(n.in[1])].grad;
        for (std::size_t i = 0; i < n.grad.size(); i++) {
            ga[i] += n.grad[i];
            gb[i] -= n.grad[i];
        }
        return;
    }
    case Op::scale: {
        auto& gx = _nodes[static_cast<std::size_t>(n.in[0])].grad;
        for (std::size_t i = 0; i < n.grad.size(); i++)
            gx[i] += n.scalar * n.grad[i];
        return;
    }
    case Op::gather: {
        const Tensor& table = _val(n.in[0]);
        auto& gt = _nodes[static_cast<std::size_t>(n.in[0])].grad;
        std::size_t dim = table.cols();
        for (std::size_t b = 0; b < n.indices.size(); b++)
            for (std::size_t c = 0; c < dim; c++)
                gt[static_cast<std::size_t>(n.indices[b]) * dim + c] += n.grad[b * dim + c];
        return;
    }
    }
}

void glorot_init(Tensor& weight, std::size_t fan_in, std::size_t fan_out, std::uint64_t seed)
{
    double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& w : weight.data)
        w = dist(rng);
}

} // namespace qdforge::autodiff
