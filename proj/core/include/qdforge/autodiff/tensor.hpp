#ifndef QDFORGE_AUTODIFF_TENSOR_HPP
#define QDFORGE_AUTODIFF_TENSOR_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace qdforge::autodiff {

// Dense row-major tensor of 64-bit reals with an optional gradient buffer.
// Invariant: product(shape) == data.size(); grad is empty or data-sized.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;
    std::vector<double> grad;

    Tensor() = default;
    Tensor(std::vector<std::size_t> s, std::vector<double> d);

    static Tensor zeros(std::vector<std::size_t> shape);
    static Tensor full(std::vector<std::size_t> shape, double value);
    static Tensor scalar(double value) { return Tensor({1}, {value}); }
    static Tensor row(std::vector<double> values);
    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    std::size_t numel() const { return data.size(); }
    // 2-D accessors; a 1-D tensor behaves as a single row.
    std::size_t rows() const { return shape.size() >= 2 ? shape[0] : 1; }
    std::size_t cols() const { return shape.empty() ? 0 : shape.back(); }
    double& at(std::size_t r, std::size_t c) { return data[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols() + c]; }

    bool same_shape(const Tensor& other) const { return shape == other.shape; }
    std::string shape_str() const;

    void ensure_grad();   // allocate a zeroed gradient buffer if absent
    void zero_grad();     // allocate if needed and zero-fill
};

} // namespace qdforge::autodiff

#endif
