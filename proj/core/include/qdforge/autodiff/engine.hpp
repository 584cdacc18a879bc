#ifndef QDFORGE_AUTODIFF_ENGINE_HPP
#define QDFORGE_AUTODIFF_ENGINE_HPP

#include <qdforge/autodiff/tensor.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace qdforge::autodiff {

enum class Activation { relu, gelu, silu, tanh, sigmoid, gaussian, softmax };

Activation activation_from_string(const std::string& name);
std::string to_string(Activation a);

// Shared forward kernels. The tape ops and the no-tape network forwards both
// route through these, so a frozen model encodes exactly as it did in training.
namespace kernels {
    // out[b,o] = sum_i x[b,i] * w[i,o] + bias[o]
    void affine(const double* x, std::size_t batch, std::size_t in_dim,
                const double* w, std::size_t out_dim, const double* bias, double* out);
    void activation_forward(Activation a, const double* x, std::size_t n, double* out);
    void softmax_rows(const double* x, std::size_t rows, std::size_t cols, double* out);
    double activation_grad(Activation a, double x, double y); // dy/dx given input x and output y
} // namespace kernels

// Eagerly evaluated computation tape. Nodes are appended in topological
// order; backward() performs one reverse sweep and accumulates leaf
// gradients into the bound Tensor's grad buffer.
class Tape {
public:
    struct Var {
        int id = -1;
        bool valid() const { return id >= 0; }
    };

    // Leaf bound to external parameter storage; backward writes param->grad.
    Var leaf(Tensor* param);
    // Leaf holding a copy of `value`; no gradient is reported for it.
    Var constant(Tensor value);

    Var affine(Var x, Var w, Var b);
    Var activation(Activation a, Var x);
    Var mse(Var a, Var b);          // mean of squared elementwise differences
    Var stop_gradient(Var x);
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var scale(Var x, double c);
    // out[b,:] = table[idx[b],:]; gradient scatter-adds into table rows.
    Var gather_rows(Var table, std::vector<int> idx);

    const Tensor& value(Var v) const;
    const std::vector<double>& grad(Var v) const; // valid after backward()

    // Reverse sweep from a scalar loss. Grads of every node (and of every
    // bound parameter) are zeroed first, so one call gives d(loss)/d(leaf).
    void backward(Var loss);

    std::size_t size() const { return _nodes.size(); }

private:
    enum class Op : std::uint8_t { leaf, constant, affine, activation, mse, stop_grad, add, sub, scale, gather };

    struct Node {
        Op op;
        std::vector<int> in;
        Tensor value;
        std::vector<double> grad;
        Tensor* external = nullptr;
        Activation act{};
        double scalar = 0.0;
        std::vector<int> indices;
    };

    std::vector<Node> _nodes;

    int _push(Node n);
    const Tensor& _val(int id) const;
    void _backward_node(Node& n);
};

// Uniform Glorot initialization in +-sqrt(6/(fan_in+fan_out)).
void glorot_init(Tensor& weight, std::size_t fan_in, std::size_t fan_out, std::uint64_t seed);

} // namespace qdforge::autodiff

#endif
