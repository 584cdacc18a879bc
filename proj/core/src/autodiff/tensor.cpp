#include <qdforge/autodiff/tensor.hpp>
#include <qdforge/common.hpp>

#include <numeric>
#include <sstream>

namespace qdforge::autodiff {

namespace {
    std::size_t shape_numel(const std::vector<std::size_t>& shape)
    {
        std::size_t n = 1;
        for (auto d : shape)
            n *= d;
        return shape.empty() ? 0 : n;
    }
} // namespace

Tensor::Tensor(std::vector<std::size_t> s, std::vector<double> d)
    : shape(std::move(s)), data(std::move(d))
{
    if (shape_numel(shape) != data.size())
        throw UsageError("tensor shape " + shape_str() + " does not match " + std::to_string(data.size()) + " elements");
}

Tensor Tensor::zeros(std::vector<std::size_t> shape)
{
    auto n = shape_numel(shape);
    return Tensor(std::move(shape), std::vector<double>(n, 0.0));
}

Tensor Tensor::full(std::vector<std::size_t> shape, double value)
{
    auto n = shape_numel(shape);
    return Tensor(std::move(shape), std::vector<double>(n, value));
}

Tensor Tensor::row(std::vector<double> values)
{
    auto n = values.size();
    return Tensor({1, n}, std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
{
    return Tensor({rows, cols}, std::move(values));
}

std::string Tensor::shape_str() const
{
    std::ostringstream out;
    out << "[";
    for (std::size_t i = 0; i < shape.size(); i++)
        out << (i ? "x" : "") << shape[i];
    out << "]";
    return out.str();
}

void Tensor::ensure_grad()
{
    if (grad.size() != data.size())
        grad.assign(data.size(), 0.0);
}

void Tensor::zero_grad()
{
    grad.assign(data.size(), 0.0);
}

} // namespace qdforge::autodiff
