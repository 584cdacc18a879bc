#include <doctest.h>

#include <qdforge/autodiff/adam.hpp>
#include <qdforge/autodiff/engine.hpp>
#include <qdforge/common.hpp>

#include <cmath>
#include <random>

using namespace qdforge;
using namespace qdforge::autodiff;

namespace {

    Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng, double scale = 1.0)
    {
        Tensor t = Tensor::zeros(std::move(shape));
        std::normal_distribution<double> dist(0.0, scale);
        for (auto& v : t.data)
            v = dist(rng);
        return t;
    }

    // independent triple-loop reference for the affine kernel
    Tensor matmul_oracle(const Tensor& x, const Tensor& w, const Tensor& b)
    {
        Tensor out = Tensor::zeros({x.rows(), w.cols()});
        for (std::size_t i = 0; i < x.rows(); i++)
            for (std::size_t j = 0; j < w.cols(); j++) {
                double acc = b.data[j];
                for (std::size_t k = 0; k < x.cols(); k++)
                    acc += x.at(i, k) * w.at(k, j);
                out.at(i, j) = acc;
            }
        return out;
    }

} // namespace

TEST_CASE("affine: identity weight passes input through")
{
    Tape t;
    auto x = t.constant(Tensor::row({1.0, 2.0}));
    Tensor w_val = Tensor::matrix(2, 2, {1, 0, 0, 1});
    Tensor b_val = Tensor::zeros({2});
    auto out = t.affine(x, t.leaf(&w_val), t.leaf(&b_val));
    CHECK(t.value(out).data[0] == 1.0);
    CHECK(t.value(out).data[1] == 2.0);
}

TEST_CASE("affine: zero input passes the bias")
{
    auto rng = make_rng(7);
    Tape t;
    auto x = t.constant(Tensor::row({0.0, 0.0}));
    Tensor w_val = random_tensor({2, 2}, rng);
    Tensor b_val = Tensor::row({3.0, -1.0});
    b_val.shape = {2};
    auto out = t.affine(x, t.leaf(&w_val), t.leaf(&b_val));
    CHECK(t.value(out).data[0] == 3.0);
    CHECK(t.value(out).data[1] == -1.0);
}

TEST_CASE("affine: random case matches triple-loop oracle")
{
    auto rng = make_rng(11);
    Tensor x = random_tensor({2, 3}, rng);
    Tensor w = random_tensor({3, 4}, rng);
    Tensor b = random_tensor({4}, rng);
    Tape t;
    auto out = t.affine(t.constant(x), t.leaf(&w), t.leaf(&b));
    Tensor expected = matmul_oracle(x, w, b);
    for (std::size_t i = 0; i < expected.numel(); i++)
        CHECK(t.value(out).data[i] == doctest::Approx(expected.data[i]).epsilon(1e-14));
}

TEST_CASE("affine: shape mismatch names the axes")
{
    Tape t;
    Tensor w = Tensor::zeros({3, 4});
    Tensor b = Tensor::zeros({4});
    auto x = t.constant(Tensor::zeros({2, 2}));
    CHECK_THROWS_WITH_AS(t.affine(x, t.leaf(&w), t.leaf(&b)),
                         doctest::Contains("does not match"), UsageError);
}

TEST_CASE("activations: fixed points and scalar oracle")
{
    Tape t;
    auto x = t.constant(Tensor::row({0.0, 1.5, -0.7}));

    auto gauss = t.activation(Activation::gaussian, x);
    CHECK(t.value(gauss).data[0] == 1.0);
    CHECK(t.value(gauss).data[1] == doctest::Approx(std::exp(-2.25)).epsilon(1e-15));

    auto th = t.activation(Activation::tanh, x);
    CHECK(t.value(th).data[0] == 0.0);

    auto sig = t.activation(Activation::sigmoid, x);
    CHECK(t.value(sig).data[0] == 0.5);

    CHECK_THROWS_AS(activation_from_string("swish"), ConfigError);
}

TEST_CASE("softmax: rows sum to one and outputs are non-negative")
{
    auto rng = make_rng(3);
    Tape t;
    auto x = t.constant(random_tensor({5, 7}, rng, 3.0));
    auto s = t.activation(Activation::softmax, x);
    for (std::size_t r = 0; r < 5; r++) {
        double sum = 0.0;
        for (std::size_t c = 0; c < 7; c++) {
            double v = t.value(s).at(r, c);
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("mse: trivial values and two-pass oracle")
{
    Tape t;
    auto a = t.constant(Tensor::row({1.0, 1.0}));
    auto b = t.constant(Tensor::row({0.0, 0.0}));
    CHECK(t.value(t.mse(a, a)).data[0] == 0.0);
    CHECK(t.value(t.mse(a, b)).data[0] == 1.0);

    auto rng = make_rng(5);
    Tensor u = random_tensor({3, 4}, rng), v = random_tensor({3, 4}, rng);
    double expected = 0.0;
    for (std::size_t i = 0; i < u.numel(); i++)
        expected += (u.data[i] - v.data[i]) * (u.data[i] - v.data[i]);
    expected /= static_cast<double>(u.numel());
    Tape t2;
    CHECK(t2.value(t2.mse(t2.constant(u), t2.constant(v))).data[0] == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("stop_gradient: bitwise identity forward, zero gradient back")
{
    auto rng = make_rng(9);
    Tensor x = random_tensor({2, 3}, rng);
    Tape t;
    auto xv = t.leaf(&x);
    auto sg = t.stop_gradient(xv);
    for (std::size_t i = 0; i < x.numel(); i++)
        CHECK(t.value(sg).data[i] == x.data[i]);

    Tensor c = Tensor::full({2, 3}, 0.5);
    auto loss = t.mse(sg, t.constant(c));
    t.backward(loss);
    for (double g : x.grad)
        CHECK(g == 0.0);
}

TEST_CASE("stop_gradient: only the live branch carries gradient")
{
    // L = mean((x + sg(x))^2); with the sg branch frozen the gradient is
    // 2*(x + x)/n, which finite differences of the frozen loss confirm.
    auto rng = make_rng(13);
    Tensor x = random_tensor({1, 4}, rng);

    Tape t;
    auto xv = t.leaf(&x);
    auto loss = t.mse(xv, t.scale(t.stop_gradient(xv), -1.0));
    t.backward(loss);

    const Tensor frozen = t.value(t.stop_gradient(xv));
    auto frozen_loss = [&](const Tensor& live) {
        double acc = 0.0;
        for (std::size_t i = 0; i < live.numel(); i++) {
            double d = live.data[i] + frozen.data[i];
            acc += d * d;
        }
        return acc / static_cast<double>(live.numel());
    };

    const double h = 1e-6;
    for (std::size_t i = 0; i < x.numel(); i++) {
        double expected = 2.0 * (x.data[i] + x.data[i]) / static_cast<double>(x.numel());
        CHECK(x.grad[i] == doctest::Approx(expected).epsilon(1e-12));

        Tensor hi = x, lo = x;
        hi.data[i] += h;
        lo.data[i] -= h;
        double numeric = (frozen_loss(hi) - frozen_loss(lo)) / (2.0 * h);
        CHECK(x.grad[i] == doctest::Approx(numeric).epsilon(1e-6));
    }
}

TEST_CASE("backward: linear regression gradient matches closed form")
{
    // loss = mse(x*w, y); d/dw = 2*x^T*(x*w - y)/n
    auto rng = make_rng(21);
    Tensor x = random_tensor({4, 3}, rng);
    Tensor w = random_tensor({3, 1}, rng);
    Tensor y = random_tensor({4, 1}, rng);
    Tensor b = Tensor::zeros({1});

    Tape t;
    auto pred = t.affine(t.constant(x), t.leaf(&w), t.leaf(&b));
    auto loss = t.mse(pred, t.constant(y));
    t.backward(loss);

    for (std::size_t j = 0; j < 3; j++) {
        double expected = 0.0;
        for (std::size_t i = 0; i < 4; i++) {
            double residual = -y.at(i, 0) + b.data[0];
            for (std::size_t k = 0; k < 3; k++)
                residual += x.at(i, k) * w.at(k, 0);
            expected += 2.0 * x.at(i, j) * residual / 4.0;
        }
        CHECK(w.grad[j] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("backward: loss independent of a parameter leaves zero gradient")
{
    Tensor used = Tensor::row({1.0, 2.0});
    Tensor unused = Tensor::row({5.0, 6.0});
    Tape t;
    auto u = t.leaf(&used);
    t.leaf(&unused);
    auto loss = t.mse(u, t.constant(Tensor::row({0.0, 0.0})));
    t.backward(loss);
    CHECK(unused.grad.size() == 2);
    CHECK(unused.grad[0] == 0.0);
    CHECK(unused.grad[1] == 0.0);
}

TEST_CASE("backward: random network gradients match central finite differences")
{
    // two-layer net with every activation on the smooth list
    for (Activation act : {Activation::gelu, Activation::silu, Activation::tanh, Activation::sigmoid, Activation::gaussian}) {
        auto rng = make_rng(100 + static_cast<int>(act));
        Tensor x = random_tensor({3, 4}, rng);
        Tensor w1 = random_tensor({4, 5}, rng, 0.7);
        Tensor b1 = random_tensor({5}, rng, 0.3);
        Tensor w2 = random_tensor({5, 2}, rng, 0.7);
        Tensor b2 = random_tensor({2}, rng, 0.3);
        Tensor target = random_tensor({3, 2}, rng);

        Tape t;
        auto h = t.activation(act, t.affine(t.constant(x), t.leaf(&w1), t.leaf(&b1)));
        auto out = t.affine(h, t.leaf(&w2), t.leaf(&b2));
        auto loss = t.mse(out, t.constant(target));
        t.backward(loss);

        auto eval_loss = [&]() {
            Tape ft;
            auto fh = ft.activation(act, ft.affine(ft.constant(x), ft.leaf(&w1), ft.leaf(&b1)));
            auto fout = ft.affine(fh, ft.leaf(&w2), ft.leaf(&b2));
            return ft.value(ft.mse(fout, ft.constant(target))).data[0];
        };

        const double step = 1e-5;
        for (Tensor* param : {&w1, &b1, &w2, &b2}) {
            std::vector<double> analytic = param->grad;
            for (std::size_t i = 0; i < param->numel(); i += std::max<std::size_t>(param->numel() / 4, 1)) {
                double saved = param->data[i];
                param->data[i] = saved + step;
                double hi = eval_loss();
                param->data[i] = saved - step;
                double lo = eval_loss();
                param->data[i] = saved;
                double numeric = (hi - lo) / (2.0 * step);
                double denom = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-8});
                CHECK(std::abs(numeric - analytic[i]) / denom < 1e-4);
            }
        }
    }
}

TEST_CASE("backward: rejects a non-scalar loss")
{
    Tape t;
    auto x = t.constant(Tensor::row({1.0, 2.0}));
    auto y = t.add(x, x);
    CHECK_THROWS_AS(t.backward(y), UsageError);
}

TEST_CASE("backward: same graph evaluated twice gives identical gradients")
{
    auto rng = make_rng(33);
    Tensor x = random_tensor({2, 3}, rng);
    Tensor w = random_tensor({3, 3}, rng);
    Tensor b = random_tensor({3}, rng);

    auto run_once = [&]() {
        Tape t;
        auto out = t.activation(Activation::tanh, t.affine(t.constant(x), t.leaf(&w), t.leaf(&b)));
        auto loss = t.mse(out, t.constant(Tensor::zeros({2, 3})));
        t.backward(loss);
        return w.grad;
    };
    auto g1 = run_once();
    auto g2 = run_once();
    CHECK(g1 == g2);
}

TEST_CASE("gather_rows: scatter-adds gradient into table rows")
{
    Tensor table = Tensor::matrix(3, 2, {1, 2, 3, 4, 5, 6});
    Tape t;
    auto g = t.gather_rows(t.leaf(&table), {2, 0, 2});
    CHECK(t.value(g).at(0, 0) == 5.0);
    CHECK(t.value(g).at(1, 1) == 2.0);
    auto loss = t.mse(g, t.constant(Tensor::zeros({3, 2})));
    t.backward(loss);
    // row 1 never gathered
    CHECK(table.grad[2] == 0.0);
    CHECK(table.grad[3] == 0.0);
    // row 2 gathered twice: grad = 2 * sum over uses of value/n
    CHECK(table.grad[4] == doctest::Approx(2.0 * (5.0 + 5.0) / 6.0));
}

TEST_CASE("adam: zero gradient leaves the parameter unchanged")
{
    Tensor p = Tensor::row({1.5});
    p.zero_grad();
    AdamState state;
    adam_step(state, {&p});
    CHECK(p.data[0] == 1.5);
}

TEST_CASE("adam: missing gradient is a usage error")
{
    Tensor p = Tensor::row({1.5});
    AdamState state;
    CHECK_THROWS_AS(adam_step(state, {&p}), UsageError);
}

TEST_CASE("adam: minimizes (p-3)^2 from zero")
{
    Tensor p = Tensor::row({0.0});
    AdamState state;
    state.lr = 0.1;
    for (int i = 0; i < 500; i++) {
        p.grad = {2.0 * (p.data[0] - 3.0)};
        adam_step(state, {&p});
    }
    CHECK(std::abs(p.data[0] - 3.0) < 1e-2);
}

TEST_CASE("adam: first step magnitude is about lr for either gradient sign")
{
    for (double g : {0.3, -4.0}) {
        Tensor p = Tensor::row({1.0});
        p.grad = {g};
        AdamState state;
        state.lr = 0.05;
        adam_step(state, {&p});
        // bias-corrected first step: lr * g / (|g| + eps) ~ lr * sign(g)
        double delta = p.data[0] - 1.0;
        CHECK(delta == doctest::Approx(-0.05 * (g > 0 ? 1.0 : -1.0)).epsilon(1e-6));
    }
}

TEST_CASE("glorot init stays within the fan bound")
{
    Tensor w = Tensor::zeros({20, 30});
    glorot_init(w, 20, 30, 4);
    double bound = std::sqrt(6.0 / 50.0);
    for (double v : w.data) {
        CHECK(v <= bound);
        CHECK(v >= -bound);
    }
}
