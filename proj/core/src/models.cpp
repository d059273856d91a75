#include "regressgan/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "regressgan/errors.hpp"

namespace regressgan {

// ---------------------------------------------------------------------------
// Mlp
// ---------------------------------------------------------------------------

Mlp Mlp::init(const MlpArchitecture& arch, RngStream& rng) {
    if (arch.input_dim == 0 || arch.output_dim == 0) {
        throw ShapeError("Mlp::init: zero input or output dim");
    }
    Mlp m;
    m.arch_ = arch;
    std::size_t in = arch.input_dim;
    const double gain = activation_gain(arch.hidden_activation);
    for (std::size_t h : arch.hidden) {
        m.layers_.push_back(DenseParams::kaiming_uniform(in, h, gain, rng));
        in = h;
    }
    m.layers_.push_back(DenseParams::xavier_uniform(in, arch.output_dim, rng));
    return m;
}

Tensor Mlp::forward(Tape& tape, const Tensor& input) const {
    Tensor h = input;
    for (std::size_t i = 0; i + 1 < layers_.size(); ++i) {
        h = dense_forward(tape, h, layers_[i]);
        h = activation(tape, h, arch_.hidden_activation);
    }
    return dense_forward(tape, h, layers_.back());
}

Matrix Mlp::forward_values(const Matrix& input) const {
    Matrix h = input;
    Matrix next;
    for (std::size_t i = 0; i + 1 < layers_.size(); ++i) {
        dense_forward_values(h, layers_[i], next);
        activation_values_inplace(next, arch_.hidden_activation);
        std::swap(h, next);
    }
    dense_forward_values(h, layers_.back(), next);
    return next;
}

std::vector<Tensor> Mlp::parameters() const {
    std::vector<Tensor> out;
    out.reserve(layers_.size() * 2);
    for (const auto& l : layers_) {
        out.push_back(l.weight);
        out.push_back(l.bias);
    }
    return out;
}

std::size_t Mlp::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.weight.numel() + l.bias.numel();
    return n;
}

std::vector<std::pair<std::string, Tensor>> Mlp::named_parameters(
    const std::string& prefix) const {
    std::vector<std::pair<std::string, Tensor>> out;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        out.emplace_back(prefix + "layer" + std::to_string(i) + ".weight", layers_[i].weight);
        out.emplace_back(prefix + "layer" + std::to_string(i) + ".bias", layers_[i].bias);
    }
    return out;
}

std::vector<std::vector<double>> Mlp::snapshot() const {
    std::vector<std::vector<double>> snap;
    for (const auto& l : layers_) {
        snap.emplace_back(l.weight.values().begin(), l.weight.values().end());
        snap.emplace_back(l.bias.values().begin(), l.bias.values().end());
    }
    return snap;
}

void Mlp::restore(const std::vector<std::vector<double>>& snap) {
    if (snap.size() != layers_.size() * 2) throw ContractError("Mlp::restore: snapshot mismatch");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        auto w = layers_[i].weight.values();
        auto b = layers_[i].bias.values();
        std::copy(snap[2 * i].begin(), snap[2 * i].end(), w.begin());
        std::copy(snap[2 * i + 1].begin(), snap[2 * i + 1].end(), b.begin());
    }
}

// ---------------------------------------------------------------------------
// Nets
// ---------------------------------------------------------------------------

GeneratorNet GeneratorNet::init(std::size_t feature_dim, std::size_t noise_dim,
                                const std::vector<std::size_t>& hidden, RngStream& rng) {
    GeneratorNet g;
    g.feature_dim = feature_dim;
    g.noise_dim = noise_dim;
    g.net = Mlp::init({feature_dim + noise_dim, hidden, 1, Activation::relu()}, rng);
    return g;
}

Tensor GeneratorNet::forward(Tape& tape, const Tensor& x, const Tensor& z) const {
    if (x.dim(0) != z.dim(0)) {
        throw ShapeError("GeneratorNet::forward: batch " + x.shape_string() + " vs " +
                         z.shape_string());
    }
    return net.forward(tape, concat_cols(tape, x, z));
}

std::vector<double> GeneratorNet::sample_values(const Matrix& x, RngStream& rng) const {
    const std::size_t n = x.rows();
    Matrix in(n, feature_dim + noise_dim);
    for (std::size_t i = 0; i < n; ++i) {
        auto src = x.row(i);
        auto dst = in.row(i);
        for (std::size_t j = 0; j < feature_dim; ++j) dst[j] = src[j];
        for (std::size_t j = 0; j < noise_dim; ++j) dst[feature_dim + j] = rng.normal();
    }
    Matrix out = net.forward_values(in);
    return out.data();
}

DiscriminatorNet DiscriminatorNet::init(std::size_t feature_dim,
                                        const std::vector<std::size_t>& hidden, RngStream& rng) {
    DiscriminatorNet d;
    d.feature_dim = feature_dim;
    d.net = Mlp::init({feature_dim + 1, hidden, 1, Activation::leaky_relu(0.2)}, rng);
    return d;
}

Tensor DiscriminatorNet::forward(Tape& tape, const Tensor& x, const Tensor& y) const {
    if (x.dim(0) != y.dim(0)) {
        throw ShapeError("DiscriminatorNet::forward: batch " + x.shape_string() + " vs " +
                         y.shape_string());
    }
    return net.forward(tape, concat_cols(tape, x, y));
}

std::vector<double> DiscriminatorNet::logits_values(const Matrix& x,
                                                    std::span<const double> y) const {
    if (x.rows() != y.size()) throw ShapeError("DiscriminatorNet::logits_values: batch mismatch");
    Matrix in(x.rows(), feature_dim + 1);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto src = x.row(i);
        auto dst = in.row(i);
        for (std::size_t j = 0; j < feature_dim; ++j) dst[j] = src[j];
        dst[feature_dim] = y[i];
    }
    return net.forward_values(in).data();
}

FnnRegressor FnnRegressor::init(std::size_t feature_dim, const std::vector<std::size_t>& hidden,
                                RngStream& rng) {
    FnnRegressor f;
    f.feature_dim = feature_dim;
    f.net = Mlp::init({feature_dim, hidden, 1, Activation::relu()}, rng);
    return f;
}

Tensor FnnRegressor::forward(Tape& tape, const Tensor& x) const { return net.forward(tape, x); }

std::vector<double> FnnRegressor::predict_values(const Matrix& x) const {
    return net.forward_values(x).data();
}

// ---------------------------------------------------------------------------
// Point prediction
// ---------------------------------------------------------------------------

double median_of(std::vector<double> values) {
    if (values.empty()) throw ContractError("median_of: empty");
    const std::size_t n = values.size();
    const std::size_t mid = n / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    const double hi = values[mid];
    if (n % 2 == 1) return hi;
    const double lo = *std::max_element(values.begin(), values.begin() + mid);
    return 0.5 * (lo + hi);
}

std::vector<double> predict_point(const GeneratorNet& gen, const Matrix& x,
                                  std::size_t k_samples, RngStream& rng) {
    if (k_samples < 1) throw ContractError("predict_point: k_samples must be >= 1");
    const std::size_t n = x.rows();
    std::vector<double> out(n);
    constexpr std::size_t kChunk = 1024;
    std::vector<double> buffer;
    std::vector<double> draws(k_samples);
    for (std::size_t start = 0; start < n; start += kChunk) {
        const std::size_t rows = std::min(kChunk, n - start);
        Matrix chunk(rows, x.cols());
        for (std::size_t i = 0; i < rows; ++i) {
            auto src = x.row(start + i);
            auto dst = chunk.row(i);
            std::copy(src.begin(), src.end(), dst.begin());
        }
        buffer.assign(rows * k_samples, 0.0);
        for (std::size_t k = 0; k < k_samples; ++k) {
            std::vector<double> sample = gen.sample_values(chunk, rng);
            for (std::size_t i = 0; i < rows; ++i) buffer[i * k_samples + k] = sample[i];
        }
        for (std::size_t i = 0; i < rows; ++i) {
            draws.assign(buffer.begin() + static_cast<std::ptrdiff_t>(i * k_samples),
                         buffer.begin() + static_cast<std::ptrdiff_t>((i + 1) * k_samples));
            out[start + i] = median_of(draws);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

void save_checkpoint(const std::string& path, const std::string& model_name,
                     const std::string& config_hash,
                     const std::vector<std::pair<std::string, Tensor>>& params) {
    std::ofstream f(path);
    if (!f) throw ParseError("save_checkpoint: cannot open " + path);
    f << "regressgan-checkpoint v1\n";
    f << "model " << model_name << "\n";
    f << "config_hash " << config_hash << "\n";
    char buf[64];
    for (const auto& [name, t] : params) {
        f << "param " << name;
        for (std::size_t s : t.shape()) f << " " << s;
        f << "\n";
        auto v = t.values();
        for (std::size_t i = 0; i < v.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%a", v[i]);
            f << buf << ((i + 1) % 8 == 0 || i + 1 == v.size() ? "\n" : " ");
        }
    }
    f << "end\n";
    if (!f.good()) throw ParseError("save_checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("load_checkpoint: cannot open " + path);
    std::string line;
    if (!std::getline(f, line) || line != "regressgan-checkpoint v1") {
        throw ParseError("load_checkpoint: bad header in " + path);
    }
    Checkpoint ckpt;
    std::string token;
    f >> token >> ckpt.model;
    f >> token;
    if (token != "config_hash") throw ParseError("load_checkpoint: missing config_hash");
    f >> ckpt.config_hash;
    while (f >> token) {
        if (token == "end") return ckpt;
        if (token != "param") throw ParseError("load_checkpoint: unexpected token '" + token + "'");
        std::string name;
        f >> name;
        // shape: the rest of the line
        std::getline(f, line);
        std::istringstream shape_in(line);
        std::vector<std::size_t> shape;
        std::size_t s;
        while (shape_in >> s) shape.push_back(s);
        std::size_t count = 1;
        for (auto d : shape) count *= d;
        std::vector<double> values(count);
        for (std::size_t i = 0; i < count; ++i) {
            if (!(f >> token)) throw ParseError("load_checkpoint: truncated values for " + name);
            values[i] = std::strtod(token.c_str(), nullptr);
        }
        ckpt.params.emplace_back(name, Tensor::from_values(std::move(shape), std::move(values)));
    }
    throw ParseError("load_checkpoint: missing end marker in " + path);
}

void restore_named_parameters(const Checkpoint& ckpt,
                              const std::vector<std::pair<std::string, Tensor>>& params) {
    if (ckpt.params.size() != params.size()) {
        throw ShapeError("restore_named_parameters: parameter count mismatch");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& [want_name, dst] = params[i];
        const auto& [got_name, src] = ckpt.params[i];
        if (want_name != got_name) {
            throw ShapeError("restore_named_parameters: expected '" + want_name + "', found '" +
                             got_name + "'");
        }
        if (src.shape() != dst.shape()) {
            throw ShapeError("restore_named_parameters: shape mismatch for " + want_name);
        }
        Tensor d = dst;
        std::copy(src.values().begin(), src.values().end(), d.values().begin());
    }
}

}  // namespace regressgan
