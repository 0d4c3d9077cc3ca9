#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "attic/errors.hpp"
#include "attic/nn/adam.hpp"
#include "attic/nn/layers.hpp"
#include "attic/nn/tensor.hpp"
#include "support/gradcheck.hpp"

using namespace attic;
using nn::Tensor;

TEST_CASE("attention of a single location is the value itself") {
    Tensor q = Tensor::constant({2, 3}, {0.3, -1, 2, 0.5, 0.1, -0.2});
    Tensor k = Tensor::constant({1, 3}, {1, 2, 3});
    Tensor v = Tensor::constant({1, 4}, {5, 6, 7, 8});
    auto res = nn::attention(q, k, v, 1.0 / std::sqrt(3.0));
    CHECK(res.weights[0] == doctest::Approx(1.0));
    CHECK(res.weights[1] == doctest::Approx(1.0));
    REQUIRE(res.output.size() == 8);
    for (int i = 0; i < 4; ++i) {
        CHECK(res.output[i] == doctest::Approx(v[i]));
        CHECK(res.output[4 + i] == doctest::Approx(v[i]));
    }
}

TEST_CASE("identical keys give uniform weights") {
    RandomStream rng(5);
    const int l = 7;
    std::vector<double> key_row = {0.4, -0.7};
    std::vector<double> keys, values;
    for (int i = 0; i < l; ++i) {
        keys.insert(keys.end(), key_row.begin(), key_row.end());
        values.push_back(rng.normal());
    }
    Tensor q = Tensor::constant({1, 2}, {1.5, -0.3});
    auto res = nn::attention(q, Tensor::constant({l, 2}, keys),
                             Tensor::constant({l, 1}, values), 0.70710678);
    for (int i = 0; i < l; ++i) CHECK(res.weights[i] == doctest::Approx(1.0 / l));
}

TEST_CASE("hand-computed softmax attention") {
    // scores [0, ln 3] -> weights [1/4, 3/4] -> output 0.25*10 + 0.75*20.
    Tensor q = Tensor::constant({1, 1}, {1.0});
    Tensor k = Tensor::constant({2, 1}, {0.0, std::log(3.0)});
    Tensor v = Tensor::constant({2, 1}, {10.0, 20.0});
    auto res = nn::attention(q, k, v, 1.0);
    CHECK(res.weights[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(res.weights[1] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(res.output[0] == doctest::Approx(17.5).epsilon(1e-12));
}

TEST_CASE("attention weight rows sum to one and lie in [0,1]") {
    RandomStream rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        int q = 1 + static_cast<int>(rng.uniform01() * 4);
        int l = 1 + static_cast<int>(rng.uniform01() * 9);
        int kd = 1 + static_cast<int>(rng.uniform01() * 6);
        int vd = 1 + static_cast<int>(rng.uniform01() * 5);
        auto fill = [&](int n) {
            std::vector<double> out(n);
            for (double& x : out) x = rng.normal() * 2.0;
            return out;
        };
        auto res = nn::attention(Tensor::constant({q, kd}, fill(q * kd)),
                                 Tensor::constant({l, kd}, fill(l * kd)),
                                 Tensor::constant({l, vd}, fill(l * vd)),
                                 1.0 / std::sqrt(kd));
        for (int i = 0; i < q; ++i) {
            double row = 0.0;
            for (int j = 0; j < l; ++j) {
                double w = res.weights[i * l + j];
                CHECK(w >= 0.0);
                CHECK(w <= 1.0);
                row += w;
            }
            CHECK(row == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("attention output is invariant to (key, value) permutation") {
    RandomStream rng(11);
    const int l = 5, kd = 3, vd = 2;
    std::vector<double> keys(l * kd), values(l * vd), query(2 * kd);
    for (double& x : keys) x = rng.normal();
    for (double& x : values) x = rng.normal();
    for (double& x : query) x = rng.normal();

    std::vector<int> perm = {3, 0, 4, 1, 2};
    std::vector<double> keys_p(l * kd), values_p(l * vd);
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < kd; ++j) keys_p[i * kd + j] = keys[perm[i] * kd + j];
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < vd; ++j) values_p[i * vd + j] = values[perm[i] * vd + j];

    Tensor q = Tensor::constant({2, kd}, query);
    auto a = nn::attention(q, Tensor::constant({l, kd}, keys),
                           Tensor::constant({l, vd}, values), 0.5);
    auto b = nn::attention(q, Tensor::constant({l, kd}, keys_p),
                           Tensor::constant({l, vd}, values_p), 0.5);
    for (int i = 0; i < a.output.size(); ++i)
        CHECK(a.output[i] == doctest::Approx(b.output[i]).epsilon(1e-12));
    for (int qi = 0; qi < 2; ++qi)
        for (int i = 0; i < l; ++i)
            CHECK(a.weights[qi * l + perm[i]] ==
                  doctest::Approx(b.weights[qi * l + i]).epsilon(1e-12));
}

TEST_CASE("lstm zero input, state and params gives zero output") {
    nn::ParameterStore params(1);
    auto lstm = nn::LstmParams{params.create("wx", {16, 3}, nn::Init::Zeros),
                               params.create("wh", {16, 4}, nn::Init::Zeros),
                               params.create("b", {16}, nn::Init::Zeros)};
    auto [out, state] = nn::lstm_step(Tensor::zeros({3}), nn::lstm_zero_state(4), lstm);
    for (int i = 0; i < 4; ++i) CHECK(out[i] == 0.0);
}

TEST_CASE("lstm cell state grows at most linearly") {
    nn::ParameterStore params(2);
    auto lstm = nn::LstmParams::create(params, "lstm", 2, 6);
    Tensor input = Tensor::constant({2}, {1.5, -0.5});
    nn::LstmState state = nn::lstm_zero_state(6);
    for (int t = 1; t <= 100; ++t) {
        auto [out, next] = nn::lstm_step(input, state, lstm);
        state = next;
        for (int i = 0; i < 6; ++i) CHECK(std::abs(state.cell[i]) <= t + 1e-9);
    }
}

TEST_CASE("adam step behavior") {
    SUBCASE("zero gradient leaves parameters unchanged") {
        nn::ParameterStore params(3);
        Tensor w = params.create("w", {4}, nn::Init::GlorotUniform);
        std::vector<double> before(w.values().begin(), w.values().end());
        params.zero_grad();
        nn::Adam adam;
        adam.step(params, 0.1);
        for (int i = 0; i < 4; ++i) CHECK(w[i] == before[i]);
    }

    SUBCASE("first step with constant gradient moves by about lr") {
        nn::ParameterStore params(4);
        Tensor w = params.create("w", {3}, nn::Init::Zeros);
        params.zero_grad();
        Tensor loss = nn::sum(nn::affine(w, 2.5, 0.0));  // d/dw = 2.5 everywhere
        nn::backward(loss);
        nn::Adam adam(0.9, 0.999, 1e-8);
        adam.step(params, 0.01);
        for (int i = 0; i < 3; ++i) CHECK(w[i] == doctest::Approx(-0.01).epsilon(1e-5));
    }

    SUBCASE("non-finite gradient throws and leaves parameters alone") {
        nn::ParameterStore params(5);
        Tensor w = params.create("w", {2}, nn::Init::Zeros);
        params.zero_grad();
        w.node()->grad[0] = std::numeric_limits<double>::quiet_NaN();
        nn::Adam adam;
        CHECK_THROWS_AS(adam.step(params, 0.1), NumericError);
        CHECK(w[0] == 0.0);
    }
}

TEST_CASE("gradients match finite differences") {
    RandomStream rng(17);

    SUBCASE("sum of W x has outer-product gradient structure") {
        nn::ParameterStore params(6);
        Tensor w = params.create("w", {4, 3}, nn::Init::GlorotUniform);
        Tensor x = Tensor::constant({3}, {0.5, -1.2, 2.0});
        auto loss = [&] { return nn::sum(nn::matvec(w, x)); };
        CHECK(testing::grad_check_max_error(params, loss, rng, 40, 1e-6) < 1e-4);
        // Analytic check: d(sum Wx)/dW_ij = x_j.
        params.zero_grad();
        nn::backward(loss());
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(w.grad()[i * 3 + j] == doctest::Approx(x[j]).epsilon(1e-12));
    }

    SUBCASE("untouched parameters keep exactly zero gradient") {
        nn::ParameterStore params(7);
        Tensor w = params.create("w", {3}, nn::Init::GlorotUniform);
        Tensor unused = params.create("unused", {2}, nn::Init::GlorotUniform);
        params.zero_grad();
        nn::backward(nn::sum(nn::tanh(w)));
        for (double g : unused.grad()) CHECK(g == 0.0);
    }

    SUBCASE("lstm step") {
        nn::ParameterStore params(8);
        auto lstm = nn::LstmParams::create(params, "lstm", 3, 5);
        Tensor x = Tensor::constant({3}, {0.4, -0.9, 1.3});
        auto loss = [&] {
            auto [out, state] = nn::lstm_step(x, nn::lstm_zero_state(5), lstm);
            auto [out2, state2] = nn::lstm_step(x, state, lstm);
            return nn::add(nn::sum(out2), nn::sum(nn::mul(state2.cell, state2.cell)));
        };
        CHECK(testing::grad_check_max_error(params, loss, rng, 100) < 1e-4);
    }

    SUBCASE("softmax, logsumexp, log_softmax, normal_log_pdf") {
        nn::ParameterStore params(9);
        Tensor a = params.create("a", {2, 3}, nn::Init::GlorotUniform);
        Tensor b = params.create("b", {4}, nn::Init::GlorotUniform);
        Tensor sd_raw = params.create("sd", {4}, nn::Init::GlorotUniform);
        auto loss = [&] {
            Tensor soft = nn::softmax_rows(a);
            Tensor l1 = nn::dot(soft, Tensor::constant({2, 3}, {1, 2, 3, 4, 5, 6}));
            Tensor l2 = nn::logsumexp(b);
            Tensor l3 = nn::sum(nn::log_softmax(b));
            Tensor lp = nn::sum(nn::normal_log_pdf(0.7, b, nn::softplus(sd_raw)));
            return nn::add(nn::add(l1, l2), nn::add(l3, lp));
        };
        CHECK(testing::grad_check_max_error(params, loss, rng, 100) < 1e-4);
    }

    SUBCASE("composed mlp, attention and mixture log-density") {
        nn::ParameterStore params(10);
        auto mlp = nn::Mlp::create(params, "mlp", {2, 8, 6});
        auto query = nn::Mlp::create(params, "query", {6, 8, 4});
        auto key = nn::Mlp::create(params, "key", {1, 4, 2});
        auto value = nn::Mlp::create(params, "value", {1, 4, 3});
        auto head = nn::Mlp::create(params, "head", {6 + 6, 8, 6});
        Tensor obs = Tensor::constant({2}, {0.8, -0.3});
        auto loss = [&] {
            Tensor embed = mlp(obs);
            std::vector<Tensor> keys, values;
            for (double xv : {0.3, -1.1, 0.7}) {
                Tensor x = Tensor::constant({1}, {xv});
                keys.push_back(key(x));
                values.push_back(value(x));
            }
            auto att = nn::attention(nn::reshape(query(embed), {2, 2}),
                                     nn::stack_rows(keys), nn::stack_rows(values), 0.70710678);
            Tensor eta = head(nn::concat(std::array{embed, att.output}));
            Tensor log_w = nn::log_softmax(nn::slice(eta, 0, 2));
            Tensor means = nn::slice(eta, 2, 2);
            Tensor stds = nn::affine(nn::softplus(nn::slice(eta, 4, 2)), 1.0, 1e-6);
            return nn::logsumexp(nn::add(log_w, nn::normal_log_pdf(0.25, means, stds)));
        };
        CHECK(testing::grad_check_max_error(params, loss, rng, 100) < 1e-4);
    }
}
