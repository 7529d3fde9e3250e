#include <doctest.h>

#include <cmath>
#include <random>

#include "socnav/error.hpp"
#include "socnav/mlp.hpp"

using namespace socnav;

namespace {

// Straightforward re-implementation of the forward pass.
std::vector<double> forward_oracle(const Mlp& net, const std::vector<double>& x) {
    std::vector<double> a = x;
    for (size_t l = 0; l < net.num_layers(); ++l) {
        const int in = net.layer_sizes[l], out = net.layer_sizes[l + 1];
        std::vector<double> z(out, 0.0);
        for (int o = 0; o < out; ++o) {
            z[o] = net.biases[l][o];
            for (int i = 0; i < in; ++i) z[o] += net.weights[l][size_t(o) * in + i] * a[i];
        }
        if (l + 1 < net.num_layers())
            for (int o = 0; o < out; ++o) z[o] = std::max(0.0, z[o]);
        a = std::move(z);
    }
    return a;
}

Batch random_batch(std::mt19937_64& rng, int count, int in, int out, LossKind kind) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Batch b;
    b.count = count;
    b.inputs.resize(size_t(count) * in);
    for (auto& v : b.inputs) v = u(rng);
    if (kind == LossKind::mse) {
        b.targets.resize(size_t(count) * out);
        for (auto& v : b.targets) v = u(rng);
    } else {
        b.labels.resize(count);
        for (auto& v : b.labels) v = int(rng() % out);
    }
    return b;
}

double loss_only(const Mlp& net, const Batch& b, LossKind kind) {
    return grad(net, b, kind).loss;
}

} // namespace

TEST_CASE("forward zero net and identity net") {
    Mlp zero = make_mlp({3, 4, 2}, 0);
    for (auto& w : zero.weights) std::fill(w.begin(), w.end(), 0.0);
    const auto out = forward(zero, {1.0, -2.0, 3.0});
    CHECK(out.size() == 2);
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 0.0);

    Mlp ident = make_mlp({3, 3}, 0);
    std::fill(ident.weights[0].begin(), ident.weights[0].end(), 0.0);
    for (int i = 0; i < 3; ++i) ident.weights[0][size_t(i) * 3 + i] = 1.0;
    const auto echo = forward(ident, {0.5, -0.25, 2.0});
    CHECK(echo[0] == 0.5);
    CHECK(echo[1] == -0.25);
    CHECK(echo[2] == 2.0);

    CHECK_THROWS_AS(forward(ident, {1.0}), DataError);
}

TEST_CASE("forward matches duplicate implementation") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const Mlp net = make_mlp({6, 9, 5, 3}, rng());
        std::vector<double> x(6);
        for (auto& v : x) v = u(rng);
        const auto got = forward(net, x);
        const auto want = forward_oracle(net, x);
        for (size_t i = 0; i < got.size(); ++i)
            CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
}

TEST_CASE("gradient matches central finite differences") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        const LossKind kind = trial % 2 == 0 ? LossKind::mse : LossKind::cross_entropy;
        Mlp net = make_mlp({5, 7, 6, 3}, rng());
        const Batch b = random_batch(rng, 4, 5, 3, kind);
        const Gradient g = grad(net, b, kind);

        const double h = 1e-5;
        double max_rel = 0.0;
        auto check_block = [&](std::vector<double>& params, const std::vector<double>& gr) {
            for (size_t i = 0; i < params.size(); ++i) {
                const double keep = params[i];
                params[i] = keep + h;
                const double up = loss_only(net, b, kind);
                params[i] = keep - h;
                const double dn = loss_only(net, b, kind);
                params[i] = keep;
                const double fd = (up - dn) / (2.0 * h);
                const double denom = std::max({std::fabs(fd), std::fabs(gr[i]), 1e-8});
                max_rel = std::max(max_rel, std::fabs(fd - gr[i]) / denom);
            }
        };
        for (size_t l = 0; l < net.num_layers(); ++l) {
            check_block(net.weights[l], g.weights[l]);
            check_block(net.biases[l], g.biases[l]);
        }
        CHECK(max_rel <= 1e-4);
    }
}

TEST_CASE("zero-residual MSE gives zero gradient") {
    Mlp net = make_mlp({3, 4, 2}, 5);
    Batch b;
    b.count = 2;
    b.inputs = {0.1, 0.2, 0.3, -0.4, 0.5, -0.6};
    b.targets.resize(4);
    auto y0 = forward(net, {0.1, 0.2, 0.3});
    auto y1 = forward(net, {-0.4, 0.5, -0.6});
    b.targets = {y0[0], y0[1], y1[0], y1[1]};
    const Gradient g = grad(net, b, LossKind::mse);
    CHECK(g.loss == doctest::Approx(0.0).epsilon(1e-18));
    for (const auto& blk : g.weights)
        for (double v : blk) CHECK(v == 0.0);
}

TEST_CASE("duplicating the batch leaves the mean gradient unchanged") {
    std::mt19937_64 rng(17);
    const Mlp net = make_mlp({4, 6, 2}, 3);
    Batch b = random_batch(rng, 3, 4, 2, LossKind::mse);
    Batch doubled = b;
    doubled.count = 6;
    doubled.inputs.insert(doubled.inputs.end(), b.inputs.begin(), b.inputs.end());
    doubled.targets.insert(doubled.targets.end(), b.targets.begin(), b.targets.end());
    const Gradient g1 = grad(net, b, LossKind::mse);
    const Gradient g2 = grad(net, doubled, LossKind::mse);
    for (size_t l = 0; l < g1.weights.size(); ++l)
        for (size_t i = 0; i < g1.weights[l].size(); ++i)
            CHECK(g1.weights[l][i] == doctest::Approx(g2.weights[l][i]).epsilon(1e-12));
}

TEST_CASE("cross entropy of uniform logits is ln 2") {
    Mlp net = make_mlp({2, 2}, 0);
    for (auto& w : net.weights) std::fill(w.begin(), w.end(), 0.0);
    Batch b;
    b.count = 1;
    b.inputs = {0.3, -0.7};
    b.labels = {1};
    const Gradient g = grad(net, b, LossKind::cross_entropy);
    CHECK(g.loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("training is deterministic from the seed") {
    std::mt19937_64 rng(1234);
    Dataset data;
    data.count = 120;
    data.input_dim = 5;
    data.target_dim = 3;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    data.inputs.resize(size_t(data.count) * data.input_dim);
    data.targets.resize(size_t(data.count) * data.target_dim);
    for (auto& v : data.inputs) v = u(rng);
    for (auto& v : data.targets) v = u(rng);

    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.seed = 42;
    const TrainResult a = train_mlp({5, 8, 3}, data, LossKind::mse, cfg);
    const TrainResult b = train_mlp({5, 8, 3}, data, LossKind::mse, cfg);
    REQUIRE(a.net.weights.size() == b.net.weights.size());
    for (size_t l = 0; l < a.net.weights.size(); ++l)
        for (size_t i = 0; i < a.net.weights[l].size(); ++i)
            CHECK(a.net.weights[l][i] == b.net.weights[l][i]);
    CHECK(a.best_epoch == b.best_epoch);
}

TEST_CASE("epochs = 0 refuses to train") {
    Dataset data;
    data.count = 4;
    data.input_dim = 2;
    data.target_dim = 1;
    data.inputs = {0, 0, 1, 1, 0, 1, 1, 0};
    data.targets = {0, 1, 1, 0};
    TrainConfig cfg;
    cfg.epochs = 0;
    CHECK_THROWS_WITH_AS(train_mlp({2, 4, 1}, data, LossKind::mse, cfg),
                         "no training performed", DataError);
}

TEST_CASE("single-class cross entropy is rejected") {
    Dataset data;
    data.count = 10;
    data.input_dim = 2;
    data.inputs.assign(20, 0.5);
    data.labels.assign(10, 1);
    TrainConfig cfg;
    cfg.epochs = 1;
    CHECK_THROWS_AS(train_mlp({2, 4, 2}, data, LossKind::cross_entropy, cfg), DataError);
}

TEST_CASE("model save/load round trip") {
    const Mlp net = make_mlp({4, 5, 2}, 77);
    ModelMeta meta;
    meta.kind = "gate";
    meta.seed = 77;
    meta.epochs = 10;
    meta.best_epoch = 3;
    meta.val_metric = 0.95;
    meta.dataset_hash = "abc";
    const auto path = std::filesystem::temp_directory_path() / "socnav_model_test.json";
    save_model(net, meta, path);
    ModelMeta meta2;
    const Mlp loaded = load_model(path, &meta2);
    CHECK(meta2.kind == "gate");
    CHECK(meta2.best_epoch == 3);
    REQUIRE(loaded.layer_sizes == net.layer_sizes);
    for (size_t l = 0; l < net.weights.size(); ++l)
        for (size_t i = 0; i < net.weights[l].size(); ++i)
            CHECK(loaded.weights[l][i] == net.weights[l][i]);
    std::filesystem::remove(path);
}
