#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "meet/kernels.hpp"
#include "meet/matrix.hpp"

namespace meet {

enum class Activation : std::uint8_t { identity = 0, tanh = 1, relu = 2 };

std::string_view to_string(Activation a);

struct DenseLayer {
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    Activation activation = Activation::identity;
    std::vector<double> weight;  // out_dim x in_dim, row-major
    std::vector<double> bias;    // out_dim
};

/// Weights of a fully connected network. The same type carries gradients and
/// update directions, which always share the parameter layout.
struct MlpParameters {
    std::vector<DenseLayer> layers;
    std::uint64_t seed = 0;

    std::size_t input_dim() const;
    std::size_t output_dim() const;
    std::size_t parameter_count() const;

    bool same_architecture(const MlpParameters& other) const;
    MlpParameters zeros_like() const;

    /// Throws NonFiniteError naming `what` if any value is NaN or Inf.
    void require_finite(std::string_view what) const;
};

/// Uniform fan-in initialisation in +-1/sqrt(fan_in) for weights and biases.
/// `layer_dims` lists input, hidden and output widths; one activation per layer.
MlpParameters mlp_init(std::span<const std::size_t> layer_dims,
                       std::span<const Activation> activations, std::uint64_t seed);

/// Activations cached by forward() for a single backward() pass.
struct GradientTape {
    std::vector<Matrix> inputs;           // input to each layer
    std::vector<Matrix> pre_activations;  // affine output of each layer
    std::size_t batch = 0;
};

std::pair<Matrix, GradientTape> forward(const MlpParameters& params, const Matrix& input,
                                        kernels::Backend backend = kernels::Backend::parallel);

/// Forward pass without recording a tape.
Matrix predict(const MlpParameters& params, const Matrix& input,
               kernels::Backend backend = kernels::Backend::parallel);

struct Gradients {
    MlpParameters params;  // d(objective)/d(parameters)
    Matrix input;          // d(objective)/d(input batch)
};

/// Reverse-mode pass. `output_gradient` is d(objective)/d(output), batch x out.
Gradients backward(const MlpParameters& params, const GradientTape& tape,
                   const Matrix& output_gradient,
                   kernels::Backend backend = kernels::Backend::parallel);

/// Like backward() but only propagates to the input.
Matrix input_gradient(const MlpParameters& params, const GradientTape& tape,
                      const Matrix& output_gradient,
                      kernels::Backend backend = kernels::Backend::parallel);

/// params += learning_rate * delta. Loss minimisers pass a negated gradient.
void apply_gradients(MlpParameters& params, const MlpParameters& delta, double learning_rate);

/// target = tau * online + (1 - tau) * target.
void polyak_update(MlpParameters& target, const MlpParameters& online, double tau);

/// acc += scale * other
void add_scaled(MlpParameters& acc, const MlpParameters& other, double scale);
void scale_in_place(MlpParameters& params, double scale);
double squared_norm(const MlpParameters& params);
double max_abs_difference(const MlpParameters& a, const MlpParameters& b);

/// Plain SGD, optionally with heavy-ball momentum:
///   v <- momentum * v + delta;  params += lr * v
class SgdOptimizer {
public:
    SgdOptimizer(double learning_rate, double momentum = 0.0);

    void step(MlpParameters& params, const MlpParameters& delta);

    double learning_rate() const { return learning_rate_; }
    double momentum() const { return momentum_; }

private:
    double learning_rate_;
    double momentum_;
    MlpParameters velocity_;
    bool has_velocity_ = false;
};

// Flat binary checkpoint, little-endian:
//   char[8]   "MEETNET1"
//   uint32    layer count L
//   uint64    L + 1 layer widths (input first)
//   uint8     L activation tags (0 identity, 1 tanh, 2 relu)
//   uint64    init seed
//   float64   per layer: weight row-major (out x in), then bias
void save_checkpoint(const MlpParameters& params, const std::filesystem::path& path);
MlpParameters load_checkpoint(const std::filesystem::path& path);

}  // namespace meet
