#include "meet/mlp.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

#include "meet/errors.hpp"

namespace meet {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

std::string_view to_string(Activation a) {
    switch (a) {
        case Activation::identity: return "identity";
        case Activation::tanh: return "tanh";
        case Activation::relu: return "relu";
    }
    return "unknown";
}

std::size_t MlpParameters::input_dim() const {
    return layers.empty() ? 0 : layers.front().in_dim;
}

std::size_t MlpParameters::output_dim() const {
    return layers.empty() ? 0 : layers.back().out_dim;
}

std::size_t MlpParameters::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weight.size() + l.bias.size();
    return n;
}

bool MlpParameters::same_architecture(const MlpParameters& other) const {
    if (layers.size() != other.layers.size()) return false;
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const auto& a = layers[k];
        const auto& b = other.layers[k];
        if (a.in_dim != b.in_dim || a.out_dim != b.out_dim || a.activation != b.activation) {
            return false;
        }
    }
    return true;
}

MlpParameters MlpParameters::zeros_like() const {
    MlpParameters z;
    z.seed = seed;
    z.layers.reserve(layers.size());
    for (const auto& l : layers) {
        z.layers.push_back({l.in_dim, l.out_dim, l.activation,
                            std::vector<double>(l.weight.size(), 0.0),
                            std::vector<double>(l.bias.size(), 0.0)});
    }
    return z;
}

void MlpParameters::require_finite(std::string_view what) const {
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const auto finite = [](double v) { return std::isfinite(v); };
        if (!std::all_of(layers[k].weight.begin(), layers[k].weight.end(), finite) ||
            !std::all_of(layers[k].bias.begin(), layers[k].bias.end(), finite)) {
            throw NonFiniteError(std::string(what) + ": non-finite value in layer " +
                                 std::to_string(k));
        }
    }
}

MlpParameters mlp_init(std::span<const std::size_t> layer_dims,
                       std::span<const Activation> activations, std::uint64_t seed) {
    if (layer_dims.size() < 2 || activations.size() != layer_dims.size() - 1) {
        throw std::invalid_argument("mlp_init: need one activation per layer and >= 2 dims");
    }
    if (std::any_of(layer_dims.begin(), layer_dims.end(), [](std::size_t d) { return d == 0; })) {
        throw std::invalid_argument("mlp_init: layer widths must be positive");
    }
    std::mt19937_64 rng(seed);
    MlpParameters p;
    p.seed = seed;
    for (std::size_t k = 0; k + 1 < layer_dims.size(); ++k) {
        DenseLayer l;
        l.in_dim = layer_dims[k];
        l.out_dim = layer_dims[k + 1];
        l.activation = activations[k];
        const double bound = 1.0 / std::sqrt(static_cast<double>(l.in_dim));
        std::uniform_real_distribution<double> dist(-bound, bound);
        l.weight.resize(l.out_dim * l.in_dim);
        l.bias.resize(l.out_dim);
        for (auto& w : l.weight) w = dist(rng);
        for (auto& b : l.bias) b = dist(rng);
        p.layers.push_back(std::move(l));
    }
    return p;
}

namespace {

void activate(Activation a, std::span<const double> z, std::span<double> out) {
    switch (a) {
        case Activation::identity:
            std::copy(z.begin(), z.end(), out.begin());
            break;
        case Activation::tanh:
            for (std::size_t i = 0; i < z.size(); ++i) out[i] = std::tanh(z[i]);
            break;
        case Activation::relu:
            for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] > 0.0 ? z[i] : 0.0;
            break;
    }
}

// grad *= f'(z), elementwise
void activation_backward(Activation a, std::span<const double> z, std::span<double> grad) {
    switch (a) {
        case Activation::identity:
            break;
        case Activation::tanh:
            for (std::size_t i = 0; i < z.size(); ++i) {
                const double t = std::tanh(z[i]);
                grad[i] *= 1.0 - t * t;
            }
            break;
        case Activation::relu:
            for (std::size_t i = 0; i < z.size(); ++i) {
                if (!(z[i] > 0.0)) grad[i] = 0.0;
            }
            break;
    }
}

void check_input(const MlpParameters& params, const Matrix& input) {
    if (params.layers.empty()) throw ShapeError("network has no layers");
    if (input.cols() != params.input_dim()) {
        throw ShapeError("input width " + std::to_string(input.cols()) +
                         " does not match network input " +
                         std::to_string(params.input_dim()));
    }
}

template <typename Fn>
void for_each_pair(MlpParameters& a, const MlpParameters& b, Fn fn) {
    if (!a.same_architecture(b)) throw ShapeError("parameter architectures differ");
    for (std::size_t k = 0; k < a.layers.size(); ++k) {
        auto& la = a.layers[k];
        const auto& lb = b.layers[k];
        for (std::size_t i = 0; i < la.weight.size(); ++i) fn(la.weight[i], lb.weight[i]);
        for (std::size_t i = 0; i < la.bias.size(); ++i) fn(la.bias[i], lb.bias[i]);
    }
}

}  // namespace

std::pair<Matrix, GradientTape> forward(const MlpParameters& params, const Matrix& input,
                                        kernels::Backend backend) {
    check_input(params, input);
    GradientTape tape;
    tape.batch = input.rows();
    tape.inputs.reserve(params.layers.size());
    tape.pre_activations.reserve(params.layers.size());
    Matrix x = input;
    for (const auto& l : params.layers) {
        Matrix z(x.rows(), l.out_dim);
        kernels::dense_forward({x.rows(), l.in_dim, l.out_dim}, x.data(), l.weight, l.bias,
                               z.data(), backend);
        Matrix a(x.rows(), l.out_dim);
        activate(l.activation, z.data(), a.data());
        tape.inputs.push_back(std::move(x));
        tape.pre_activations.push_back(std::move(z));
        x = std::move(a);
    }
    return {std::move(x), std::move(tape)};
}

Matrix predict(const MlpParameters& params, const Matrix& input, kernels::Backend backend) {
    check_input(params, input);
    Matrix x = input;
    for (const auto& l : params.layers) {
        Matrix z(x.rows(), l.out_dim);
        kernels::dense_forward({x.rows(), l.in_dim, l.out_dim}, x.data(), l.weight, l.bias,
                               z.data(), backend);
        activate(l.activation, z.data(), z.data());
        x = std::move(z);
    }
    return x;
}

namespace {

Gradients backward_impl(const MlpParameters& params, const GradientTape& tape,
                        const Matrix& output_gradient, kernels::Backend backend,
                        bool want_params) {
    const std::size_t depth = params.layers.size();
    if (tape.inputs.size() != depth || tape.pre_activations.size() != depth) {
        throw InvalidTapeError("tape layer count does not match parameters");
    }
    for (std::size_t k = 0; k < depth; ++k) {
        const auto& l = params.layers[k];
        if (tape.inputs[k].rows() != tape.batch || tape.inputs[k].cols() != l.in_dim ||
            tape.pre_activations[k].rows() != tape.batch ||
            tape.pre_activations[k].cols() != l.out_dim) {
            throw InvalidTapeError("tape shapes do not match layer " + std::to_string(k));
        }
    }
    if (output_gradient.rows() != tape.batch || output_gradient.cols() != params.output_dim()) {
        throw ShapeError("output gradient shape does not match network output");
    }

    Gradients g{want_params ? params.zeros_like() : MlpParameters{}, Matrix{}};
    Matrix upstream = output_gradient;
    for (std::size_t k = depth; k-- > 0;) {
        const auto& l = params.layers[k];
        activation_backward(l.activation, tape.pre_activations[k].data(), upstream.data());
        const kernels::DenseShape shape{tape.batch, l.in_dim, l.out_dim};
        if (want_params) {
            auto& gl = g.params.layers[k];
            kernels::dense_param_grad(shape, upstream.data(), tape.inputs[k].data(), gl.weight,
                                      gl.bias, backend);
        }
        Matrix down(tape.batch, l.in_dim);
        kernels::dense_input_grad(shape, upstream.data(), l.weight, down.data(), backend);
        upstream = std::move(down);
    }
    g.input = std::move(upstream);
    return g;
}

}  // namespace

Gradients backward(const MlpParameters& params, const GradientTape& tape,
                   const Matrix& output_gradient, kernels::Backend backend) {
    return backward_impl(params, tape, output_gradient, backend, true);
}

Matrix input_gradient(const MlpParameters& params, const GradientTape& tape,
                      const Matrix& output_gradient, kernels::Backend backend) {
    return backward_impl(params, tape, output_gradient, backend, false).input;
}

void apply_gradients(MlpParameters& params, const MlpParameters& delta, double learning_rate) {
    for_each_pair(params, delta, [learning_rate](double& p, double d) { p += learning_rate * d; });
    params.require_finite("apply_gradients");
}

void polyak_update(MlpParameters& target, const MlpParameters& online, double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("polyak_update: tau outside [0,1]");
    if (tau == 1.0) {
        for_each_pair(target, online, [](double& t, double o) { t = o; });
        return;
    }
    for_each_pair(target, online, [tau](double& t, double o) { t = tau * o + (1.0 - tau) * t; });
}

void add_scaled(MlpParameters& acc, const MlpParameters& other, double scale) {
    for_each_pair(acc, other, [scale](double& a, double o) { a += scale * o; });
}

void scale_in_place(MlpParameters& params, double scale) {
    for (auto& l : params.layers) {
        for (auto& w : l.weight) w *= scale;
        for (auto& b : l.bias) b *= scale;
    }
}

double squared_norm(const MlpParameters& params) {
    double s = 0.0;
    for (const auto& l : params.layers) {
        for (double w : l.weight) s += w * w;
        for (double b : l.bias) s += b * b;
    }
    return s;
}

double max_abs_difference(const MlpParameters& a, const MlpParameters& b) {
    double m = 0.0;
    MlpParameters copy = a;
    for_each_pair(copy, b, [&m](double& x, double y) { m = std::max(m, std::abs(x - y)); });
    return m;
}

SgdOptimizer::SgdOptimizer(double learning_rate, double momentum)
    : learning_rate_(learning_rate), momentum_(momentum) {
    if (!(momentum >= 0.0 && momentum < 1.0)) {
        throw std::invalid_argument("SgdOptimizer: momentum must be in [0, 1)");
    }
}

void SgdOptimizer::step(MlpParameters& params, const MlpParameters& delta) {
    if (momentum_ == 0.0) {
        apply_gradients(params, delta, learning_rate_);
        return;
    }
    if (!has_velocity_) {
        velocity_ = params.zeros_like();
        has_velocity_ = true;
    }
    scale_in_place(velocity_, momentum_);
    add_scaled(velocity_, delta, 1.0);
    apply_gradients(params, velocity_, learning_rate_);
}

namespace {

constexpr std::array<char, 8> kMagic{'M', 'E', 'E', 'T', 'N', 'E', 'T', '1'};

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("checkpoint truncated");
    return v;
}

}  // namespace

void save_checkpoint(const MlpParameters& params, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(kMagic.data(), kMagic.size());
    write_pod(out, static_cast<std::uint32_t>(params.layers.size()));
    write_pod(out, static_cast<std::uint64_t>(params.input_dim()));
    for (const auto& l : params.layers) write_pod(out, static_cast<std::uint64_t>(l.out_dim));
    for (const auto& l : params.layers) write_pod(out, static_cast<std::uint8_t>(l.activation));
    write_pod(out, params.seed);
    for (const auto& l : params.layers) {
        out.write(reinterpret_cast<const char*>(l.weight.data()),
                  static_cast<std::streamsize>(l.weight.size() * sizeof(double)));
        out.write(reinterpret_cast<const char*>(l.bias.data()),
                  static_cast<std::streamsize>(l.bias.size() * sizeof(double)));
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

MlpParameters load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw std::runtime_error(path.string() + ": bad checkpoint magic");
    const auto depth = read_pod<std::uint32_t>(in);
    std::vector<std::size_t> dims(depth + 1);
    for (auto& d : dims) d = static_cast<std::size_t>(read_pod<std::uint64_t>(in));
    std::vector<Activation> acts(depth);
    for (auto& a : acts) {
        const auto tag = read_pod<std::uint8_t>(in);
        if (tag > 2) throw std::runtime_error("checkpoint: unknown activation tag");
        a = static_cast<Activation>(tag);
    }
    MlpParameters p;
    p.seed = read_pod<std::uint64_t>(in);
    for (std::size_t k = 0; k < depth; ++k) {
        DenseLayer l{dims[k], dims[k + 1], acts[k], std::vector<double>(dims[k + 1] * dims[k]),
                     std::vector<double>(dims[k + 1])};
        in.read(reinterpret_cast<char*>(l.weight.data()),
                static_cast<std::streamsize>(l.weight.size() * sizeof(double)));
        in.read(reinterpret_cast<char*>(l.bias.data()),
                static_cast<std::streamsize>(l.bias.size() * sizeof(double)));
        if (!in) throw std::runtime_error("checkpoint truncated");
        p.layers.push_back(std::move(l));
    }
    p.require_finite("load_checkpoint");
    return p;
}

}  // namespace meet
