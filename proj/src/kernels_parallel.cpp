#include "meet/kernels.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace meet::kernels {

namespace {

// Below this many multiply-adds a parallel region costs more than it saves.
constexpr std::size_t kParallelWork = 1u << 15;

// Register tile: kRowTile rows of C by kColTile columns.
constexpr std::size_t kRowTile = 4;
constexpr std::size_t kColTile = 16;

// C (m x n) = or += A (m x k) * B (k x n); all row-major and dense. Each
// element of the product is summed over p = 0..k-1 in ascending order
// whichever path computes it, regardless of thread count.
inline void full_tile(std::size_t k, std::size_t n, const double* __restrict a_rows,
                      const double* __restrict b, double* __restrict c, bool accumulate) {
    double acc[kRowTile][kColTile] = {};
    for (std::size_t p = 0; p < k; ++p) {
        const double* __restrict b_row = b + p * n;
        for (std::size_t r = 0; r < kRowTile; ++r) {
            const double a = a_rows[r * k + p];
#pragma omp simd
            for (std::size_t col = 0; col < kColTile; ++col) acc[r][col] += a * b_row[col];
        }
    }
    for (std::size_t r = 0; r < kRowTile; ++r) {
        double* c_row = c + r * n;
        for (std::size_t col = 0; col < kColTile; ++col) {
            c_row[col] = accumulate ? c_row[col] + acc[r][col] : acc[r][col];
        }
    }
}

inline void edge_tile(std::size_t k, std::size_t n, const double* __restrict a_rows,
                      const double* __restrict b, double* __restrict c, bool accumulate,
                      std::size_t mb, std::size_t nb) {
    for (std::size_t r = 0; r < mb; ++r) {
        const double* a = a_rows + r * k;
        double acc[kColTile] = {};
        if (nb == kColTile) {
            for (std::size_t p = 0; p < k; ++p) {
                const double* __restrict b_row = b + p * n;
#pragma omp simd
                for (std::size_t col = 0; col < kColTile; ++col) acc[col] += a[p] * b_row[col];
            }
        } else {
            for (std::size_t p = 0; p < k; ++p) {
                const double* __restrict b_row = b + p * n;
                for (std::size_t col = 0; col < nb; ++col) acc[col] += a[p] * b_row[col];
            }
        }
        double* c_row = c + r * n;
        for (std::size_t col = 0; col < nb; ++col) {
            c_row[col] = accumulate ? c_row[col] + acc[col] : acc[col];
        }
    }
}

std::vector<double> transpose(std::span<const double> src, std::size_t rows, std::size_t cols) {
    std::vector<double> t(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) t[c * rows + r] = src[r * cols + c];
    }
    return t;
}

void gemm_wide(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c,
               bool accumulate) {
    const auto row_blocks = static_cast<std::int64_t>((m + kRowTile - 1) / kRowTile);
#pragma omp parallel for schedule(static) if (m * n * k >= kParallelWork)
    for (std::int64_t blk = 0; blk < row_blocks; ++blk) {
        const std::size_t i0 = static_cast<std::size_t>(blk) * kRowTile;
        const std::size_t mb = std::min(kRowTile, m - i0);
        for (std::size_t j0 = 0; j0 < n; j0 += kColTile) {
            const std::size_t nb = std::min(kColTile, n - j0);
            if (mb == kRowTile && nb == kColTile) {
                full_tile(k, n, a + i0 * k, b + j0, c + i0 * n + j0, accumulate);
            } else {
                edge_tile(k, n, a + i0 * k, b + j0, c + i0 * n + j0, accumulate, mb, nb);
            }
        }
    }
}



// Products narrower than one column tile. Eight independent row accumulators
// keep the adds from serialising on a single register.
constexpr std::size_t kNarrowRows = 8;

template <std::size_t NB>
void gemm_narrow(std::size_t m, std::size_t k, const double* __restrict a, const double* __restrict b,
                 double* __restrict c, bool accumulate) {
    const auto row_blocks = static_cast<std::int64_t>((m + kNarrowRows - 1) / kNarrowRows);
#pragma omp parallel for schedule(static) if (m * NB * k >= kParallelWork)
    for (std::int64_t blk = 0; blk < row_blocks; ++blk) {
        const std::size_t i0 = static_cast<std::size_t>(blk) * kNarrowRows;
        const std::size_t mb = std::min(kNarrowRows, m - i0);
        const double* a_rows = a + i0 * k;
        double* c_rows = c + i0 * NB;
        if (mb == kNarrowRows) {
            double acc[kNarrowRows][NB] = {};
            for (std::size_t p = 0; p < k; ++p) {
                const double* b_row = b + p * NB;
                for (std::size_t r = 0; r < kNarrowRows; ++r) {
                    const double x = a_rows[r * k + p];
                    for (std::size_t col = 0; col < NB; ++col) acc[r][col] += x * b_row[col];
                }
            }
            for (std::size_t r = 0; r < kNarrowRows; ++r) {
                for (std::size_t col = 0; col < NB; ++col) {
                    double& out = c_rows[r * NB + col];
                    out = accumulate ? out + acc[r][col] : acc[r][col];
                }
            }
        } else {
            for (std::size_t r = 0; r < mb; ++r) {
                double acc[NB] = {};
                for (std::size_t p = 0; p < k; ++p) {
                    const double x = a_rows[r * k + p];
                    for (std::size_t col = 0; col < NB; ++col) acc[col] += x * b[p * NB + col];
                }
                for (std::size_t col = 0; col < NB; ++col) {
                    double& out = c_rows[r * NB + col];
                    out = accumulate ? out + acc[col] : acc[col];
                }
            }
        }
    }
}

using NarrowFn = void (*)(std::size_t, std::size_t, const double*, const double*, double*, bool);

template <std::size_t... I>
constexpr std::array<NarrowFn, sizeof...(I)> narrow_table(std::index_sequence<I...>) {
    return {&gemm_narrow<I + 1>...};
}

constexpr auto kNarrow = narrow_table(std::make_index_sequence<kColTile - 1>{});

// C (m x n) = or += A (m x k) * B (k x n).
void gemm(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c,
          bool accumulate) {
    if (n == 0 || m == 0) return;
    if (n < kColTile) {
        kNarrow[n - 1](m, k, a, b, c, accumulate);
    } else {
        gemm_wide(m, n, k, a, b, c, accumulate);
    }
}

}  // namespace

namespace parallel {

void dense_forward(DenseShape s, std::span<const double> input,
                   std::span<const double> weight, std::span<const double> bias,
                   std::span<double> output) {
    const auto wt = transpose(weight, s.out_dim, s.in_dim);  // in x out
    gemm(s.batch, s.out_dim, s.in_dim, input.data(), wt.data(), output.data(), false);
    for (std::size_t n = 0; n < s.batch; ++n) {
        double* y = output.data() + n * s.out_dim;
        for (std::size_t o = 0; o < s.out_dim; ++o) y[o] = bias[o] + y[o];
    }
}

void dense_input_grad(DenseShape s, std::span<const double> output_grad,
                      std::span<const double> weight, std::span<double> input_grad) {
    gemm(s.batch, s.in_dim, s.out_dim, output_grad.data(), weight.data(), input_grad.data(), false);
}

void dense_param_grad(DenseShape s, std::span<const double> output_grad,
                      std::span<const double> input, std::span<double> weight_grad,
                      std::span<double> bias_grad) {
    const auto gt = transpose(output_grad, s.batch, s.out_dim);  // out x batch
    gemm(s.out_dim, s.in_dim, s.batch, gt.data(), input.data(), weight_grad.data(), true);
    for (std::size_t o = 0; o < s.out_dim; ++o) {
        const double* g = gt.data() + o * s.batch;
        double acc = 0.0;
        for (std::size_t n = 0; n < s.batch; ++n) acc += g[n];
        bias_grad[o] += acc;
    }
}

}  // namespace parallel

void dense_forward(DenseShape shape, std::span<const double> input,
                   std::span<const double> weight, std::span<const double> bias,
                   std::span<double> output, Backend backend) {
    if (backend == Backend::serial) {
        serial::dense_forward(shape, input, weight, bias, output);
    } else {
        parallel::dense_forward(shape, input, weight, bias, output);
    }
}

void dense_input_grad(DenseShape shape, std::span<const double> output_grad,
                      std::span<const double> weight, std::span<double> input_grad,
                      Backend backend) {
    if (backend == Backend::serial) {
        serial::dense_input_grad(shape, output_grad, weight, input_grad);
    } else {
        parallel::dense_input_grad(shape, output_grad, weight, input_grad);
    }
}

void dense_param_grad(DenseShape shape, std::span<const double> output_grad,
                      std::span<const double> input, std::span<double> weight_grad,
                      std::span<double> bias_grad, Backend backend) {
    if (backend == Backend::serial) {
        serial::dense_param_grad(shape, output_grad, input, weight_grad, bias_grad);
    } else {
        parallel::dense_param_grad(shape, output_grad, input, weight_grad, bias_grad);
    }
}

bool openmp_enabled() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

}  // namespace meet::kernels
