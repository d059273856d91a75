#pragma once

#include <string>
#include <utility>
#include <vector>

#include "regressgan/autodiff.hpp"
#include "regressgan/matrix.hpp"
#include "regressgan/rng.hpp"

namespace regressgan {

struct MlpArchitecture {
    std::size_t input_dim = 0;
    std::vector<std::size_t> hidden;
    std::size_t output_dim = 1;
    Activation hidden_activation = Activation::relu();
};

// Fully connected net: hidden layers with a shared activation, linear output.
// Hidden weights are Kaiming-uniform, the output layer Xavier-uniform, biases
// zero; the scheme is part of the training config hash.
class Mlp {
public:
    Mlp() = default;

    static Mlp init(const MlpArchitecture& arch, RngStream& rng);

    Tensor forward(Tape& tape, const Tensor& input) const;
    Matrix forward_values(const Matrix& input) const;

    std::vector<Tensor> parameters() const;
    std::size_t parameter_count() const;
    std::vector<std::pair<std::string, Tensor>> named_parameters(const std::string& prefix) const;

    std::vector<std::vector<double>> snapshot() const;
    void restore(const std::vector<std::vector<double>>& snap);

    const MlpArchitecture& architecture() const { return arch_; }

private:
    MlpArchitecture arch_;
    std::vector<DenseParams> layers_;
};

// Conditional generator G(x, z): input concat(x, z), unconstrained real
// output so heavy-tailed targets stay representable.
struct GeneratorNet {
    Mlp net;
    std::size_t feature_dim = 0;
    std::size_t noise_dim = 10;

    static GeneratorNet init(std::size_t feature_dim, std::size_t noise_dim,
                             const std::vector<std::size_t>& hidden, RngStream& rng);

    Tensor forward(Tape& tape, const Tensor& x, const Tensor& z) const;

    // One sampled prediction per row; z drawn from rng. No tape.
    std::vector<double> sample_values(const Matrix& x, RngStream& rng) const;
};

// Conditional discriminator D(x, y) -> logit. Sigmoid lives in the loss.
struct DiscriminatorNet {
    Mlp net;
    std::size_t feature_dim = 0;

    static DiscriminatorNet init(std::size_t feature_dim, const std::vector<std::size_t>& hidden,
                                 RngStream& rng);

    Tensor forward(Tape& tape, const Tensor& x, const Tensor& y) const;
    std::vector<double> logits_values(const Matrix& x, std::span<const double> y) const;
};

// MSE baseline: same wiring as the generator without the noise input.
struct FnnRegressor {
    Mlp net;
    std::size_t feature_dim = 0;

    static FnnRegressor init(std::size_t feature_dim, const std::vector<std::size_t>& hidden,
                             RngStream& rng);

    Tensor forward(Tape& tape, const Tensor& x) const;
    std::vector<double> predict_values(const Matrix& x) const;
};

// Point prediction from the stochastic generator: per row, the empirical
// median of k_samples draws (the MAE-optimal summary). Even k averages the
// two central order statistics.
std::vector<double> predict_point(const GeneratorNet& gen, const Matrix& x,
                                  std::size_t k_samples, RngStream& rng);

double median_of(std::vector<double> values);

// ---------------------------------------------------------------------------
// Checkpoints: textual named parameter arrays with shapes and the config
// hash. Values are written as hexfloats, so a load round-trip is bit-exact.
// ---------------------------------------------------------------------------

struct Checkpoint {
    std::string model;
    std::string config_hash;
    std::vector<std::pair<std::string, Tensor>> params;
};

void save_checkpoint(const std::string& path, const std::string& model_name,
                     const std::string& config_hash,
                     const std::vector<std::pair<std::string, Tensor>>& params);
Checkpoint load_checkpoint(const std::string& path);

// Copies checkpoint values into the matching named parameters; names and
// shapes must line up exactly.
void restore_named_parameters(const Checkpoint& ckpt,
                              const std::vector<std::pair<std::string, Tensor>>& params);

}  // namespace regressgan
