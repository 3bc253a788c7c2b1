#pragma once

#include <cstddef>
#include <span>

namespace meet::kernels {

// Dense-layer kernels over a row-major batch. Shapes:
//   input      batch x in_dim
//   weight     out_dim x in_dim
//   bias       out_dim
//   output     batch x out_dim
//
// `serial` is the plain textbook loop nest and serves as the test reference.
// `parallel` is the production path: OpenMP across independent rows (or
// output units for the weight gradient) with contiguous inner loops. Each
// reduction is summed in the same order as the serial kernel, so both
// backends agree to rounding and runs stay reproducible at any thread count.

enum class Backend { serial, parallel };

struct DenseShape {
    std::size_t batch;
    std::size_t in_dim;
    std::size_t out_dim;
};

namespace serial {

void dense_forward(DenseShape shape, std::span<const double> input,
                   std::span<const double> weight, std::span<const double> bias,
                   std::span<double> output);

// input_grad = output_grad * weight  (overwrites)
void dense_input_grad(DenseShape shape, std::span<const double> output_grad,
                      std::span<const double> weight, std::span<double> input_grad);

// weight_grad += output_grad^T * input, bias_grad += column sums of output_grad
void dense_param_grad(DenseShape shape, std::span<const double> output_grad,
                      std::span<const double> input, std::span<double> weight_grad,
                      std::span<double> bias_grad);

}  // namespace serial

namespace parallel {

void dense_forward(DenseShape shape, std::span<const double> input,
                   std::span<const double> weight, std::span<const double> bias,
                   std::span<double> output);

void dense_input_grad(DenseShape shape, std::span<const double> output_grad,
                      std::span<const double> weight, std::span<double> input_grad);

void dense_param_grad(DenseShape shape, std::span<const double> output_grad,
                      std::span<const double> input, std::span<double> weight_grad,
                      std::span<double> bias_grad);

}  // namespace parallel

// Dispatching entry points used by the network code.
void dense_forward(DenseShape shape, std::span<const double> input,
                   std::span<const double> weight, std::span<const double> bias,
                   std::span<double> output, Backend backend = Backend::parallel);

void dense_input_grad(DenseShape shape, std::span<const double> output_grad,
                      std::span<const double> weight, std::span<double> input_grad,
                      Backend backend = Backend::parallel);

void dense_param_grad(DenseShape shape, std::span<const double> output_grad,
                      std::span<const double> input, std::span<double> weight_grad,
                      std::span<double> bias_grad, Backend backend = Backend::parallel);

// True when the library was built with OpenMP.
bool openmp_enabled();

}  // namespace meet::kernels
