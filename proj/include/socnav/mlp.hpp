#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace socnav {

// Dense ReLU network with a linear output head. Weights are stored
// row-major per layer: w[l][o * in + i].
struct Mlp {
    std::vector<int> layer_sizes;               // [in, hidden..., out]
    std::vector<std::vector<double>> weights;   // one block per layer transition
    std::vector<std::vector<double>> biases;

    int input_size() const { return layer_sizes.front(); }
    int output_size() const { return layer_sizes.back(); }
    size_t num_layers() const { return weights.size(); }
    size_t num_params() const;
};

// Uniform(+-sqrt(6/(fan_in+fan_out))) init, deterministic from seed.
Mlp make_mlp(const std::vector<int>& layer_sizes, uint64_t seed);

// Single forward pass. Throws DataError on input size mismatch.
std::vector<double> forward(const Mlp& net, const std::vector<double>& x);

enum class LossKind { mse, cross_entropy };

struct Batch {
    // Row-major: inputs[s * in + i]. For mse, targets are dense rows of
    // output size; for cross_entropy, labels[s] holds the class index.
    std::vector<double> inputs;
    std::vector<double> targets;
    std::vector<int> labels;
    std::vector<double> sample_weights; // empty means all-ones
    int count = 0;
};

struct Gradient {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
    double loss = 0.0;
};

// Exact analytic gradient of the mean batch loss.
// mse: mean over samples and output dims of squared error.
// cross_entropy: (weighted) mean over samples of -log softmax(y)[label].
Gradient grad(const Mlp& net, const Batch& batch, LossKind kind);

struct TrainConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    int batch_size = 64;
    int epochs = 50;
    uint64_t seed = 0;
    double val_fraction = 0.1;
};

struct TrainResult {
    Mlp net;             // parameters from the best validation epoch
    int best_epoch = -1; // 0-based
    double best_val_metric = 0.0;
    // One row per epoch: {train_loss, val_metric}.
    std::vector<std::pair<double, double>> curve;
};

struct Dataset {
    std::vector<double> inputs;  // row-major
    std::vector<double> targets; // row-major, mse only
    std::vector<int> labels;     // cross_entropy only
    int count = 0;
    int input_dim = 0;
    int target_dim = 0;
};

// Adam training with deterministic seeded shuffling and a fixed train/val
// split. For mse the validation metric is MSE (lower is better); for
// cross_entropy it is accuracy (higher is better). Cross-entropy samples
// get inverse-class-frequency weights. Throws DataError on epochs == 0
// ("no training performed") or a single-class cross-entropy dataset.
TrainResult train_mlp(const std::vector<int>& layer_sizes, const Dataset& data,
                      LossKind kind, const TrainConfig& cfg);

struct ModelMeta {
    std::string kind;        // "bc" or "gate"
    uint64_t seed = 0;
    int epochs = 0;
    int best_epoch = -1;
    double val_metric = 0.0;
    std::string dataset_hash;
};

void save_model(const Mlp& net, const ModelMeta& meta, const std::filesystem::path& path);
Mlp load_model(const std::filesystem::path& path, ModelMeta* meta = nullptr);

} // namespace socnav
