#include "socnav/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <json.hpp>

#include "socnav/error.hpp"
#include "socnav/io.hpp"

namespace socnav {

size_t Mlp::num_params() const {
    size_t n = 0;
    for (size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
    return n;
}

Mlp make_mlp(const std::vector<int>& layer_sizes, uint64_t seed) {
    if (layer_sizes.size() < 2) throw DataError("make_mlp: need at least 2 layers");
    Mlp net;
    net.layer_sizes = layer_sizes;
    std::mt19937_64 rng(seed);
    for (size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const int fan_in = layer_sizes[l], fan_out = layer_sizes[l + 1];
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> u(-bound, bound);
        std::vector<double> w(size_t(fan_in) * fan_out);
        for (auto& v : w) v = u(rng);
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(fan_out, 0.0);
    }
    return net;
}

namespace {

// Batched forward keeping pre-activations for backprop.
// activations[0] is the input; activations[l+1] = relu(z[l]) except the
// last layer which stays linear.
struct ForwardPass {
    std::vector<std::vector<double>> acts; // per layer, row-major [count x dim]
};

ForwardPass forward_batch(const Mlp& net, const std::vector<double>& inputs, int count) {
    ForwardPass fp;
    fp.acts.resize(net.num_layers() + 1);
    fp.acts[0] = inputs;
    for (size_t l = 0; l < net.num_layers(); ++l) {
        const int in = net.layer_sizes[l], out = net.layer_sizes[l + 1];
        const bool last = (l + 1 == net.num_layers());
        std::vector<double> z(size_t(count) * out);
        const auto& a = fp.acts[l];
        const auto& w = net.weights[l];
        const auto& b = net.biases[l];
        for (int s = 0; s < count; ++s) {
            double* zs = z.data() + size_t(s) * out;
            const double* as = a.data() + size_t(s) * in;
            for (int o = 0; o < out; ++o) zs[o] = b[o];
            // Row-major weights: w[o * in + i]; loop order (o, i) keeps the
            // weight row contiguous.
            for (int o = 0; o < out; ++o) {
                const double* wr = w.data() + size_t(o) * in;
                double acc = zs[o];
                for (int i = 0; i < in; ++i) acc += wr[i] * as[i];
                zs[o] = acc;
            }
            if (!last)
                for (int o = 0; o < out; ++o) zs[o] = std::max(0.0, zs[o]);
        }
        fp.acts[l + 1] = std::move(z);
    }
    return fp;
}

std::vector<double> softmax_row(const double* z, int n) {
    double mx = z[0];
    for (int i = 1; i < n; ++i) mx = std::max(mx, z[i]);
    std::vector<double> p(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        p[i] = std::exp(z[i] - mx);
        sum += p[i];
    }
    for (int i = 0; i < n; ++i) p[i] /= sum;
    return p;
}

} // namespace

std::vector<double> forward(const Mlp& net, const std::vector<double>& x) {
    if (int(x.size()) != net.input_size())
        throw DataError("forward: input size mismatch");
    auto fp = forward_batch(net, x, 1);
    return fp.acts.back();
}

Gradient grad(const Mlp& net, const Batch& batch, LossKind kind) {
    const int count = batch.count;
    const int out_dim = net.output_size();
    if (count <= 0) throw DataError("grad: empty batch");
    if (int(batch.inputs.size()) != count * net.input_size())
        throw DataError("grad: input size mismatch");

    auto fp = forward_batch(net, batch.inputs, count);
    const auto& y = fp.acts.back();

    Gradient g;
    g.weights.resize(net.num_layers());
    g.biases.resize(net.num_layers());
    for (size_t l = 0; l < net.num_layers(); ++l) {
        g.weights[l].assign(net.weights[l].size(), 0.0);
        g.biases[l].assign(net.biases[l].size(), 0.0);
    }

    // dL/dz for the output layer.
    std::vector<double> delta(size_t(count) * out_dim);
    double loss = 0.0;
    if (kind == LossKind::mse) {
        if (int(batch.targets.size()) != count * out_dim)
            throw DataError("grad: target size mismatch");
        const double scale = 1.0 / (double(count) * out_dim);
        for (int s = 0; s < count; ++s)
            for (int o = 0; o < out_dim; ++o) {
                const double r = y[size_t(s) * out_dim + o] - batch.targets[size_t(s) * out_dim + o];
                loss += r * r * scale;
                delta[size_t(s) * out_dim + o] = 2.0 * r * scale;
            }
    } else {
        if (int(batch.labels.size()) != count) throw DataError("grad: labels missing");
        for (int s = 0; s < count; ++s) {
            const double w = batch.sample_weights.empty() ? 1.0 : batch.sample_weights[s];
            const int c = batch.labels[s];
            if (c < 0 || c >= out_dim) throw DataError("grad: label out of range");
            auto p = softmax_row(y.data() + size_t(s) * out_dim, out_dim);
            loss += -w * std::log(std::max(p[c], 1e-300)) / count;
            for (int o = 0; o < out_dim; ++o)
                delta[size_t(s) * out_dim + o] = w * (p[o] - (o == c ? 1.0 : 0.0)) / count;
        }
    }
    g.loss = loss;

    // Backprop through the layers.
    for (int l = int(net.num_layers()) - 1; l >= 0; --l) {
        const int in = net.layer_sizes[l], out = net.layer_sizes[l + 1];
        const auto& a_prev = fp.acts[l];
        auto& gw = g.weights[l];
        auto& gb = g.biases[l];
        for (int s = 0; s < count; ++s) {
            const double* ds = delta.data() + size_t(s) * out;
            const double* as = a_prev.data() + size_t(s) * in;
            for (int o = 0; o < out; ++o) {
                const double d = ds[o];
                if (d == 0.0) continue;
                gb[o] += d;
                double* gwr = gw.data() + size_t(o) * in;
                for (int i = 0; i < in; ++i) gwr[i] += d * as[i];
            }
        }
        if (l == 0) break;
        // delta for the previous layer, gated by its ReLU.
        std::vector<double> prev(size_t(count) * in, 0.0);
        const auto& w = net.weights[l];
        for (int s = 0; s < count; ++s) {
            const double* ds = delta.data() + size_t(s) * out;
            double* ps = prev.data() + size_t(s) * in;
            const double* as = a_prev.data() + size_t(s) * in;
            for (int o = 0; o < out; ++o) {
                const double d = ds[o];
                if (d == 0.0) continue;
                const double* wr = w.data() + size_t(o) * in;
                for (int i = 0; i < in; ++i) ps[i] += d * wr[i];
            }
            for (int i = 0; i < in; ++i)
                if (as[i] <= 0.0) ps[i] = 0.0; // relu'(z)=0 for z<=0
        }
        delta = std::move(prev);
    }
    return g;
}

namespace {

struct AdamState {
    std::vector<std::vector<double>> m_w, v_w, m_b, v_b;
    long t = 0;

    explicit AdamState(const Mlp& net) {
        for (size_t l = 0; l < net.num_layers(); ++l) {
            m_w.emplace_back(net.weights[l].size(), 0.0);
            v_w.emplace_back(net.weights[l].size(), 0.0);
            m_b.emplace_back(net.biases[l].size(), 0.0);
            v_b.emplace_back(net.biases[l].size(), 0.0);
        }
    }

    void apply(Mlp& net, const Gradient& g, const TrainConfig& cfg) {
        ++t;
        const double bc1 = 1.0 - std::pow(cfg.beta1, double(t));
        const double bc2 = 1.0 - std::pow(cfg.beta2, double(t));
        auto upd = [&](std::vector<double>& p, const std::vector<double>& gr,
                       std::vector<double>& m, std::vector<double>& v) {
            for (size_t i = 0; i < p.size(); ++i) {
                m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * gr[i];
                v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * gr[i] * gr[i];
                const double mh = m[i] / bc1, vh = v[i] / bc2;
                p[i] -= cfg.lr * mh / (std::sqrt(vh) + cfg.adam_eps);
            }
        };
        for (size_t l = 0; l < net.num_layers(); ++l) {
            upd(net.weights[l], g.weights[l], m_w[l], v_w[l]);
            upd(net.biases[l], g.biases[l], m_b[l], v_b[l]);
        }
    }
};

Batch slice_batch(const Dataset& data, const std::vector<size_t>& idx, size_t begin,
                  size_t end, LossKind kind, const std::vector<double>& weights) {
    Batch b;
    b.count = int(end - begin);
    b.inputs.resize(size_t(b.count) * data.input_dim);
    for (size_t k = begin; k < end; ++k) {
        const size_t s = idx[k];
        std::copy_n(data.inputs.data() + s * data.input_dim, data.input_dim,
                    b.inputs.data() + (k - begin) * data.input_dim);
    }
    if (kind == LossKind::mse) {
        b.targets.resize(size_t(b.count) * data.target_dim);
        for (size_t k = begin; k < end; ++k)
            std::copy_n(data.targets.data() + idx[k] * data.target_dim, data.target_dim,
                        b.targets.data() + (k - begin) * data.target_dim);
    } else {
        b.labels.resize(b.count);
        b.sample_weights.resize(b.count);
        for (size_t k = begin; k < end; ++k) {
            b.labels[k - begin] = data.labels[idx[k]];
            b.sample_weights[k - begin] = weights[idx[k]];
        }
    }
    return b;
}

double eval_mse(const Mlp& net, const Dataset& data, const std::vector<size_t>& idx) {
    if (idx.empty()) return 0.0;
    double total = 0.0;
    for (size_t s : idx) {
        std::vector<double> x(data.inputs.begin() + s * data.input_dim,
                              data.inputs.begin() + (s + 1) * data.input_dim);
        auto y = forward(net, x);
        for (int o = 0; o < data.target_dim; ++o) {
            const double r = y[o] - data.targets[s * data.target_dim + o];
            total += r * r;
        }
    }
    return total / (double(idx.size()) * data.target_dim);
}

double eval_accuracy(const Mlp& net, const Dataset& data, const std::vector<size_t>& idx) {
    if (idx.empty()) return 0.0;
    size_t hit = 0;
    for (size_t s : idx) {
        std::vector<double> x(data.inputs.begin() + s * data.input_dim,
                              data.inputs.begin() + (s + 1) * data.input_dim);
        auto y = forward(net, x);
        // Tie at exactly equal logits resolves to class 1, matching the
        // deployment-side gate convention.
        const int pred = y[1] >= y[0] ? 1 : 0;
        if (pred == data.labels[s]) ++hit;
    }
    return double(hit) / double(idx.size());
}

} // namespace

TrainResult train_mlp(const std::vector<int>& layer_sizes, const Dataset& data,
                      LossKind kind, const TrainConfig& cfg) {
    if (cfg.epochs <= 0) throw DataError("no training performed");
    if (data.count <= 0) throw DataError("train_mlp: empty dataset");
    if (data.input_dim != layer_sizes.front())
        throw DataError("train_mlp: input dim mismatch");

    std::vector<double> weights;
    if (kind == LossKind::cross_entropy) {
        std::vector<size_t> class_count(size_t(layer_sizes.back()), 0);
        for (int s = 0; s < data.count; ++s) class_count[data.labels[s]]++;
        size_t present = 0;
        for (size_t c : class_count) present += c > 0 ? 1 : 0;
        if (present < 2) throw DataError("train_mlp: single-class dataset");
        // Inverse frequency, normalized so the mean sample weight is 1.
        weights.resize(data.count);
        for (int s = 0; s < data.count; ++s)
            weights[s] = double(data.count) /
                         (double(present) * double(class_count[data.labels[s]]));
    }

    std::mt19937_64 rng(cfg.seed);
    std::vector<size_t> order(data.count);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    const size_t val_n = std::min<size_t>(
        data.count > 1 ? size_t(std::llround(cfg.val_fraction * data.count)) : 0,
        size_t(data.count - 1));
    std::vector<size_t> val_idx(order.begin(), order.begin() + val_n);
    std::vector<size_t> train_idx(order.begin() + val_n, order.end());
    if (val_idx.empty()) val_idx = train_idx; // tiny datasets validate in-sample

    Mlp net = make_mlp(layer_sizes, cfg.seed);
    AdamState adam(net);

    TrainResult result;
    result.net = net;
    const bool maximize = kind == LossKind::cross_entropy;
    result.best_val_metric = maximize ? -1.0 : std::numeric_limits<double>::infinity();

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(train_idx.begin(), train_idx.end(), rng);
        double train_loss = 0.0;
        size_t batches = 0;
        for (size_t begin = 0; begin < train_idx.size(); begin += cfg.batch_size) {
            const size_t end = std::min(train_idx.size(), begin + cfg.batch_size);
            Batch b = slice_batch(data, train_idx, begin, end, kind, weights);
            Gradient g = grad(net, b, kind);
            adam.apply(net, g, cfg);
            train_loss += g.loss;
            ++batches;
        }
        train_loss /= std::max<size_t>(batches, 1);

        const double val = kind == LossKind::mse ? eval_mse(net, data, val_idx)
                                                 : eval_accuracy(net, data, val_idx);
        result.curve.emplace_back(train_loss, val);
        const bool better = maximize ? val > result.best_val_metric
                                     : val < result.best_val_metric;
        if (better) {
            result.best_val_metric = val;
            result.best_epoch = epoch;
            result.net = net;
        }
    }
    return result;
}

void save_model(const Mlp& net, const ModelMeta& meta, const std::filesystem::path& path) {
    nlohmann::json j;
    j["version"] = 1;
    j["kind"] = meta.kind;
    j["layer_sizes"] = net.layer_sizes;
    // Weights are serialized as %.17g strings for exact round-trip and
    // byte-stable files.
    auto dump_block = [](const std::vector<std::vector<double>>& blocks) {
        std::vector<std::vector<std::string>> out;
        for (const auto& blk : blocks) {
            std::vector<std::string> row;
            row.reserve(blk.size());
            for (double v : blk) row.push_back(fmt_g17(v));
            out.push_back(std::move(row));
        }
        return out;
    };
    j["weights"] = dump_block(net.weights);
    j["biases"] = dump_block(net.biases);
    j["meta"] = {{"seed", meta.seed},
                 {"epochs", meta.epochs},
                 {"best_epoch", meta.best_epoch},
                 {"val_metric", fmt_g17(meta.val_metric)},
                 {"dataset_hash", meta.dataset_hash}};
    atomic_write_file(path, j.dump(2) + "\n");
}

Mlp load_model(const std::filesystem::path& path, ModelMeta* meta) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw DataError("model parse error in " + path.string() + ": " + e.what());
    }
    if (!j.contains("version")) throw DataError("model file missing version: " + path.string());
    Mlp net;
    net.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
    auto load_block = [](const nlohmann::json& arr) {
        std::vector<std::vector<double>> out;
        for (const auto& blk : arr) {
            std::vector<double> row;
            row.reserve(blk.size());
            for (const auto& v : blk) row.push_back(std::stod(v.get<std::string>()));
            out.push_back(std::move(row));
        }
        return out;
    };
    net.weights = load_block(j.at("weights"));
    net.biases = load_block(j.at("biases"));
    if (meta) {
        meta->kind = j.value("kind", "");
        const auto& m = j.at("meta");
        meta->seed = m.value("seed", 0ull);
        meta->epochs = m.value("epochs", 0);
        meta->best_epoch = m.value("best_epoch", -1);
        meta->val_metric = std::stod(m.value("val_metric", std::string("0")));
        meta->dataset_hash = m.value("dataset_hash", "");
    }
    return net;
}

} // namespace socnav
