#include "meet/kernels.hpp"

namespace meet::kernels::serial {

void dense_forward(DenseShape s, std::span<const double> input,
                   std::span<const double> weight, std::span<const double> bias,
                   std::span<double> output) {
    for (std::size_t n = 0; n < s.batch; ++n) {
        for (std::size_t o = 0; o < s.out_dim; ++o) {
            double acc = 0.0;
            for (std::size_t i = 0; i < s.in_dim; ++i) {
                acc += weight[o * s.in_dim + i] * input[n * s.in_dim + i];
            }
            output[n * s.out_dim + o] = bias[o] + acc;
        }
    }
}

void dense_input_grad(DenseShape s, std::span<const double> output_grad,
                      std::span<const double> weight, std::span<double> input_grad) {
    for (std::size_t n = 0; n < s.batch; ++n) {
        for (std::size_t i = 0; i < s.in_dim; ++i) {
            double acc = 0.0;
            for (std::size_t o = 0; o < s.out_dim; ++o) {
                acc += output_grad[n * s.out_dim + o] * weight[o * s.in_dim + i];
            }
            input_grad[n * s.in_dim + i] = acc;
        }
    }
}

void dense_param_grad(DenseShape s, std::span<const double> output_grad,
                      std::span<const double> input, std::span<double> weight_grad,
                      std::span<double> bias_grad) {
    for (std::size_t o = 0; o < s.out_dim; ++o) {
        for (std::size_t i = 0; i < s.in_dim; ++i) {
            double acc = weight_grad[o * s.in_dim + i];
            for (std::size_t n = 0; n < s.batch; ++n) {
                acc += output_grad[n * s.out_dim + o] * input[n * s.in_dim + i];
            }
            weight_grad[o * s.in_dim + i] = acc;
        }
        double acc = bias_grad[o];
        for (std::size_t n = 0; n < s.batch; ++n) {
            acc += output_grad[n * s.out_dim + o];
        }
        bias_grad[o] = acc;
    }
}

}  // namespace meet::kernels::serial
