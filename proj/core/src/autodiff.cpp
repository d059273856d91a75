#include "regressgan/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "regressgan/errors.hpp"

namespace regressgan {

double stable_sigmoid(double t) {
    if (t >= 0.0) {
        return 1.0 / (1.0 + std::exp(-t));
    }
    const double e = std::exp(t);
    return e / (1.0 + e);
}

double softplus(double t) {
    // log(1 + e^t) = max(t, 0) + log1p(e^{-|t|})
    return std::max(t, 0.0) + std::log1p(std::exp(-std::fabs(t)));
}

// ---------------------------------------------------------------------------
// Tensor
// ---------------------------------------------------------------------------

namespace {

std::size_t shape_numel(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (auto s : shape) n *= s;
    return n;
}

void check_finite(std::span<const double> v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) throw NumericError(std::string(what) + ": non-finite value");
    }
}

}  // namespace

Tensor Tensor::zeros(std::vector<std::size_t> shape, bool requires_grad) {
    Tensor t;
    t.d_ = std::make_shared<Data>();
    t.d_->values.assign(shape_numel(shape), 0.0);
    t.d_->shape = std::move(shape);
    t.d_->requires_grad = requires_grad;
    return t;
}

Tensor Tensor::from_values(std::vector<std::size_t> shape, std::vector<double> values,
                           bool requires_grad) {
    if (shape_numel(shape) != values.size()) {
        throw ShapeError("Tensor::from_values: " + std::to_string(values.size()) +
                         " values do not fill the given shape");
    }
    Tensor t;
    t.d_ = std::make_shared<Data>();
    t.d_->shape = std::move(shape);
    t.d_->values = std::move(values);
    t.d_->requires_grad = requires_grad;
    return t;
}

Tensor Tensor::from_matrix(const Matrix& m, bool requires_grad) {
    return from_values({m.rows(), m.cols()}, m.data(), requires_grad);
}

Tensor Tensor::column(std::span<const double> values, bool requires_grad) {
    return from_values({values.size(), 1}, {values.begin(), values.end()}, requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) {
    return from_values({1}, {value}, requires_grad);
}

const std::vector<std::size_t>& Tensor::shape() const { return d_->shape; }
std::size_t Tensor::numel() const { return d_->values.size(); }
std::span<double> Tensor::values() { return d_->values; }
std::span<const double> Tensor::values() const { return d_->values; }

double Tensor::scalar_value() const {
    if (!is_scalar()) throw ContractError("scalar_value on tensor of shape " + shape_string());
    return d_->values[0];
}

bool Tensor::requires_grad() const { return d_->requires_grad; }
void Tensor::set_requires_grad(bool v) { d_->requires_grad = v; }

bool Tensor::has_grad() const { return !d_->grad.empty(); }

std::span<double> Tensor::grad() {
    if (!has_grad()) throw ContractError("grad() on tensor without gradient");
    return d_->grad;
}

std::span<const double> Tensor::grad() const {
    if (!has_grad()) throw ContractError("grad() on tensor without gradient");
    return d_->grad;
}

std::span<double> Tensor::ensure_grad() {
    if (d_->grad.empty()) d_->grad.assign(d_->values.size(), 0.0);
    return d_->grad;
}

void Tensor::zero_grad() {
    std::fill(d_->grad.begin(), d_->grad.end(), 0.0);
}

bool Tensor::is_internal() const { return d_->internal; }

std::string Tensor::shape_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < d_->shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(d_->shape[i]);
    }
    return s + "]";
}

// ---------------------------------------------------------------------------
// Tape
// ---------------------------------------------------------------------------

Tensor Tape::record(std::vector<Tensor> inputs, Tensor output,
                    std::function<void(const Node&)> backward_rule) {
    output.d_->internal = true;
    nodes_.push_back(Node{std::move(inputs), output, std::move(backward_rule)});
    return nodes_.back().output;
}

void Tape::backward(const Tensor& root) {
    if (!root.defined() || !root.is_scalar()) {
        throw ContractError("backward: root must be a scalar tensor");
    }
    if (!root.is_internal()) {
        throw ContractError("backward: root was not produced on a tape");
    }
    Tensor r = root;
    r.ensure_grad()[0] += 1.0;
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
        if (!it->output.has_grad()) continue;  // dead branch
        it->backward(*it);
    }
}

// ---------------------------------------------------------------------------
// Parameter initialization
// ---------------------------------------------------------------------------

namespace {

Tensor uniform_tensor(std::vector<std::size_t> shape, double bound, RngStream& rng) {
    Tensor t = Tensor::zeros(std::move(shape), true);
    for (double& v : t.values()) v = (2.0 * rng.uniform() - 1.0) * bound;
    return t;
}

}  // namespace

DenseParams DenseParams::kaiming_uniform(std::size_t in_dim, std::size_t out_dim, double gain,
                                         RngStream& rng) {
    const double bound = gain * std::sqrt(3.0 / static_cast<double>(in_dim));
    DenseParams p;
    p.weight = uniform_tensor({in_dim, out_dim}, bound, rng);
    p.bias = Tensor::zeros({out_dim}, true);
    return p;
}

DenseParams DenseParams::xavier_uniform(std::size_t in_dim, std::size_t out_dim, RngStream& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(in_dim + out_dim));
    DenseParams p;
    p.weight = uniform_tensor({in_dim, out_dim}, bound, rng);
    p.bias = Tensor::zeros({out_dim}, true);
    return p;
}

double activation_gain(const Activation& act) {
    switch (act.kind) {
        case ActivationKind::relu:
            return std::sqrt(2.0);
        case ActivationKind::leaky_relu:
            return std::sqrt(2.0 / (1.0 + act.slope * act.slope));
        default:
            return 1.0;
    }
}

// ---------------------------------------------------------------------------
// Recorded ops
// ---------------------------------------------------------------------------

Tensor dense_forward(Tape& tape, const Tensor& x, const DenseParams& p) {
    if (x.shape().size() != 2 || x.dim(1) != p.in_dim()) {
        throw ShapeError("dense_forward: input " + x.shape_string() + " vs weight " +
                         p.weight.shape_string());
    }
    const std::size_t batch = x.dim(0);
    const std::size_t in = p.in_dim();
    const std::size_t out = p.out_dim();

    Tensor y = Tensor::zeros({batch, out});
    {
        auto xv = x.values();
        auto wv = p.weight.values();
        auto bv = p.bias.values();
        auto yv = y.values();
        for (std::size_t i = 0; i < batch; ++i) {
            double* yr = yv.data() + i * out;
            for (std::size_t j = 0; j < out; ++j) yr[j] = bv[j];
            const double* xr = xv.data() + i * in;
            for (std::size_t k = 0; k < in; ++k) {
                const double xk = xr[k];
                const double* wr = wv.data() + k * out;
                for (std::size_t j = 0; j < out; ++j) yr[j] += xk * wr[j];
            }
        }
    }

    return tape.record({x, p.weight, p.bias}, y, [batch, in, out](const Tape::Node& node) {
        const Tensor& xi = node.inputs[0];
        const Tensor& wi = node.inputs[1];
        const Tensor& bi = node.inputs[2];
        auto gy = node.output.grad();
        auto xv = xi.values();
        auto wv = wi.values();

        if (Tensor xm = xi; xm.wants_grad()) {
            auto gx = xm.ensure_grad();
            // dX[i,k] += sum_j dY[i,j] W[k,j]
            for (std::size_t i = 0; i < batch; ++i) {
                const double* gyr = gy.data() + i * out;
                double* gxr = gx.data() + i * in;
                for (std::size_t k = 0; k < in; ++k) {
                    const double* wr = wv.data() + k * out;
                    double s = 0.0;
                    for (std::size_t j = 0; j < out; ++j) s += gyr[j] * wr[j];
                    gxr[k] += s;
                }
            }
        }
        if (Tensor wm = wi; wm.wants_grad()) {
            auto gw = wm.ensure_grad();
            // dW[k,j] += sum_i X[i,k] dY[i,j]
            for (std::size_t i = 0; i < batch; ++i) {
                const double* xr = xv.data() + i * in;
                const double* gyr = gy.data() + i * out;
                for (std::size_t k = 0; k < in; ++k) {
                    const double xk = xr[k];
                    double* gwr = gw.data() + k * out;
                    for (std::size_t j = 0; j < out; ++j) gwr[j] += xk * gyr[j];
                }
            }
        }
        if (Tensor bm = bi; bm.wants_grad()) {
            auto gb = bm.ensure_grad();
            for (std::size_t i = 0; i < batch; ++i) {
                const double* gyr = gy.data() + i * out;
                for (std::size_t j = 0; j < out; ++j) gb[j] += gyr[j];
            }
        }
    });
}

Tensor activation(Tape& tape, const Tensor& x, const Activation& act) {
    if (act.kind == ActivationKind::identity) return x;

    Tensor y = Tensor::zeros(x.shape());
    auto xv = x.values();
    auto yv = y.values();
    switch (act.kind) {
        case ActivationKind::relu:
            for (std::size_t i = 0; i < xv.size(); ++i) yv[i] = xv[i] > 0.0 ? xv[i] : 0.0;
            break;
        case ActivationKind::leaky_relu:
            for (std::size_t i = 0; i < xv.size(); ++i)
                yv[i] = xv[i] > 0.0 ? xv[i] : act.slope * xv[i];
            break;
        case ActivationKind::sigmoid:
            for (std::size_t i = 0; i < xv.size(); ++i) yv[i] = stable_sigmoid(xv[i]);
            break;
        case ActivationKind::identity:
            break;
    }

    const Activation a = act;
    return tape.record({x}, y, [a](const Tape::Node& node) {
        Tensor xi = node.inputs[0];
        if (!xi.wants_grad()) return;
        auto gy = node.output.grad();
        auto gx = xi.ensure_grad();
        auto xv = xi.values();
        auto yv = node.output.values();
        switch (a.kind) {
            case ActivationKind::relu:
                for (std::size_t i = 0; i < gx.size(); ++i)
                    if (xv[i] > 0.0) gx[i] += gy[i];
                break;
            case ActivationKind::leaky_relu:
                for (std::size_t i = 0; i < gx.size(); ++i)
                    gx[i] += gy[i] * (xv[i] > 0.0 ? 1.0 : a.slope);
                break;
            case ActivationKind::sigmoid:
                for (std::size_t i = 0; i < gx.size(); ++i)
                    gx[i] += gy[i] * yv[i] * (1.0 - yv[i]);
                break;
            case ActivationKind::identity:
                break;
        }
    });
}

Tensor concat_cols(Tape& tape, const Tensor& a, const Tensor& b) {
    if (a.shape().size() != 2 || b.shape().size() != 2 || a.dim(0) != b.dim(0)) {
        throw ShapeError("concat_cols: " + a.shape_string() + " vs " + b.shape_string());
    }
    const std::size_t rows = a.dim(0);
    const std::size_t ca = a.dim(1);
    const std::size_t cb = b.dim(1);
    Tensor y = Tensor::zeros({rows, ca + cb});
    auto av = a.values();
    auto bv = b.values();
    auto yv = y.values();
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < ca; ++j) yv[i * (ca + cb) + j] = av[i * ca + j];
        for (std::size_t j = 0; j < cb; ++j) yv[i * (ca + cb) + ca + j] = bv[i * cb + j];
    }
    return tape.record({a, b}, y, [rows, ca, cb](const Tape::Node& node) {
        auto gy = node.output.grad();
        if (Tensor ai = node.inputs[0]; ai.wants_grad()) {
            auto ga = ai.ensure_grad();
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < ca; ++j) ga[i * ca + j] += gy[i * (ca + cb) + j];
        }
        if (Tensor bi = node.inputs[1]; bi.wants_grad()) {
            auto gb = bi.ensure_grad();
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < cb; ++j) gb[i * cb + j] += gy[i * (ca + cb) + ca + j];
        }
    });
}

Tensor add(Tape& tape, const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) {
        throw ShapeError("add: " + a.shape_string() + " vs " + b.shape_string());
    }
    Tensor y = Tensor::zeros(a.shape());
    auto av = a.values();
    auto bv = b.values();
    auto yv = y.values();
    for (std::size_t i = 0; i < yv.size(); ++i) yv[i] = av[i] + bv[i];
    return tape.record({a, b}, y, [](const Tape::Node& node) {
        auto gy = node.output.grad();
        for (int k = 0; k < 2; ++k) {
            if (Tensor t = node.inputs[k]; t.wants_grad()) {
                auto g = t.ensure_grad();
                for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy[i];
            }
        }
    });
}

Tensor mse_loss(Tape& tape, const Tensor& pred, const Tensor& target) {
    if (pred.shape() != target.shape()) {
        throw ShapeError("mse_loss: " + pred.shape_string() + " vs " + target.shape_string());
    }
    check_finite(pred.values(), "mse_loss(pred)");
    check_finite(target.values(), "mse_loss(target)");
    const std::size_t n = pred.numel();
    auto pv = pred.values();
    auto tv = target.values();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = pv[i] - tv[i];
        s += d * d;
    }
    Tensor y = Tensor::scalar(s / static_cast<double>(n));
    return tape.record({pred, target}, y, [n](const Tape::Node& node) {
        const double g = node.output.grad()[0];
        const double scale = 2.0 * g / static_cast<double>(n);
        auto pv = node.inputs[0].values();
        auto tv = node.inputs[1].values();
        if (Tensor p = node.inputs[0]; p.wants_grad()) {
            auto gp = p.ensure_grad();
            for (std::size_t i = 0; i < n; ++i) gp[i] += scale * (pv[i] - tv[i]);
        }
        if (Tensor t = node.inputs[1]; t.wants_grad()) {
            auto gt = t.ensure_grad();
            for (std::size_t i = 0; i < n; ++i) gt[i] -= scale * (pv[i] - tv[i]);
        }
    });
}

Tensor bce_with_logits_loss(Tape& tape, const Tensor& logits, const Tensor& targets) {
    if (logits.shape() != targets.shape()) {
        throw ShapeError("bce_with_logits_loss: " + logits.shape_string() + " vs " +
                         targets.shape_string());
    }
    check_finite(logits.values(), "bce_with_logits_loss(logits)");
    auto zv = logits.values();
    auto yv = targets.values();
    const std::size_t n = zv.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (yv[i] != 0.0 && yv[i] != 1.0) {
            throw ContractError("bce_with_logits_loss: targets must be exactly 0 or 1");
        }
        // max(z,0) - z*y + log1p(exp(-|z|))
        s += std::max(zv[i], 0.0) - zv[i] * yv[i] + std::log1p(std::exp(-std::fabs(zv[i])));
    }
    Tensor out = Tensor::scalar(s / static_cast<double>(n));
    return tape.record({logits, targets}, out, [n](const Tape::Node& node) {
        Tensor z = node.inputs[0];
        if (!z.wants_grad()) return;
        const double g = node.output.grad()[0] / static_cast<double>(n);
        auto zv = z.values();
        auto yv = node.inputs[1].values();
        auto gz = z.ensure_grad();
        for (std::size_t i = 0; i < n; ++i) gz[i] += g * (stable_sigmoid(zv[i]) - yv[i]);
    });
}

Tensor loss(Tape& tape, const Tensor& pred, const Tensor& target, LossKind kind) {
    switch (kind) {
        case LossKind::mse:
            return mse_loss(tape, pred, target);
        case LossKind::bce_with_logits:
            return bce_with_logits_loss(tape, pred, target);
    }
    throw ContractError("loss: unknown kind");
}

Tensor generator_adversarial_loss(Tape& tape, const Tensor& fake_logits, GeneratorLossKind kind) {
    check_finite(fake_logits.values(), "generator_adversarial_loss(logits)");
    auto zv = fake_logits.values();
    const std::size_t n = zv.size();
    double s = 0.0;
    if (kind == GeneratorLossKind::minimax) {
        for (std::size_t i = 0; i < n; ++i) s -= softplus(zv[i]);
    } else {
        for (std::size_t i = 0; i < n; ++i) s += softplus(-zv[i]);
    }
    Tensor out = Tensor::scalar(s / static_cast<double>(n));
    return tape.record({fake_logits}, out, [n, kind](const Tape::Node& node) {
        Tensor z = node.inputs[0];
        if (!z.wants_grad()) return;
        const double g = node.output.grad()[0] / static_cast<double>(n);
        auto zv = z.values();
        auto gz = z.ensure_grad();
        if (kind == GeneratorLossKind::minimax) {
            // d/dz -softplus(z) = -sigmoid(z)
            for (std::size_t i = 0; i < n; ++i) gz[i] -= g * stable_sigmoid(zv[i]);
        } else {
            // d/dz softplus(-z) = sigmoid(z) - 1
            for (std::size_t i = 0; i < n; ++i) gz[i] += g * (stable_sigmoid(zv[i]) - 1.0);
        }
    });
}

// ---------------------------------------------------------------------------
// Value-only kernels
// ---------------------------------------------------------------------------

void dense_forward_values(const Matrix& x, const DenseParams& p, Matrix& out) {
    const std::size_t batch = x.rows();
    const std::size_t in = p.in_dim();
    const std::size_t outd = p.out_dim();
    if (x.cols() != in) {
        throw ShapeError("dense_forward_values: input cols " + std::to_string(x.cols()) +
                         " vs weight " + p.weight.shape_string());
    }
    if (out.rows() != batch || out.cols() != outd) out = Matrix(batch, outd);
    auto wv = p.weight.values();
    auto bv = p.bias.values();
    for (std::size_t i = 0; i < batch; ++i) {
        double* yr = out.data().data() + i * outd;
        for (std::size_t j = 0; j < outd; ++j) yr[j] = bv[j];
        const double* xr = x.data().data() + i * in;
        for (std::size_t k = 0; k < in; ++k) {
            const double xk = xr[k];
            const double* wr = wv.data() + k * outd;
            for (std::size_t j = 0; j < outd; ++j) yr[j] += xk * wr[j];
        }
    }
}

void activation_values_inplace(Matrix& m, const Activation& act) {
    switch (act.kind) {
        case ActivationKind::identity:
            return;
        case ActivationKind::relu:
            for (double& v : m.data()) v = v > 0.0 ? v : 0.0;
            return;
        case ActivationKind::leaky_relu:
            for (double& v : m.data()) v = v > 0.0 ? v : act.slope * v;
            return;
        case ActivationKind::sigmoid:
            for (double& v : m.data()) v = stable_sigmoid(v);
            return;
    }
}

}  // namespace regressgan
