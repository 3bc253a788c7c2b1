#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "meet/kernels.hpp"

TEST_SUITE_BEGIN("kernels");

namespace k = meet::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
    }
    return m;
}

}  // namespace

TEST_CASE("parallel kernels agree with the serial reference") {
    std::mt19937_64 rng(42);
    // Shapes straddle the parallel-work threshold.
    const k::DenseShape shapes[] = {{1, 3, 1}, {7, 5, 3}, {256, 64, 64}, {256, 4, 64}, {300, 64, 10}};
    for (const auto s : shapes) {
        CAPTURE(s.batch);
        CAPTURE(s.in_dim);
        CAPTURE(s.out_dim);
        const auto x = random_vec(s.batch * s.in_dim, rng);
        const auto w = random_vec(s.out_dim * s.in_dim, rng);
        const auto b = random_vec(s.out_dim, rng);
        const auto g = random_vec(s.batch * s.out_dim, rng);

        std::vector<double> y_ser(s.batch * s.out_dim), y_par(s.batch * s.out_dim);
        k::serial::dense_forward(s, x, w, b, y_ser);
        k::parallel::dense_forward(s, x, w, b, y_par);
        CHECK(max_rel_diff(y_par, y_ser) < 1e-12);

        std::vector<double> gi_ser(s.batch * s.in_dim), gi_par(s.batch * s.in_dim, 99.0);
        k::serial::dense_input_grad(s, g, w, gi_ser);
        k::parallel::dense_input_grad(s, g, w, gi_par);
        CHECK(max_rel_diff(gi_par, gi_ser) < 1e-12);

        // Accumulating: start from a non-zero gradient buffer.
        auto gw_ser = random_vec(s.out_dim * s.in_dim, rng);
        auto gb_ser = random_vec(s.out_dim, rng);
        auto gw_par = gw_ser;
        auto gb_par = gb_ser;
        k::serial::dense_param_grad(s, g, x, gw_ser, gb_ser);
        k::parallel::dense_param_grad(s, g, x, gw_par, gb_par);
        CHECK(max_rel_diff(gw_par, gw_ser) < 1e-12);
        CHECK(max_rel_diff(gb_par, gb_ser) < 1e-12);
    }
}

TEST_CASE("serial forward against a hand computation") {
    // y = W x + b with W = [[1, 2], [3, 4]], x = [1, -1], b = [0.5, -0.5]
    const std::vector<double> w{1, 2, 3, 4}, b{0.5, -0.5}, x{1, -1};
    std::vector<double> y(2);
    k::serial::dense_forward({1, 2, 2}, x, w, b, y);
    CHECK(y[0] == doctest::Approx(-0.5));
    CHECK(y[1] == doctest::Approx(-1.5));
}

TEST_CASE("parallel kernels are deterministic across calls") {
    std::mt19937_64 rng(1);
    const k::DenseShape s{512, 64, 64};
    const auto x = random_vec(s.batch * s.in_dim, rng);
    const auto w = random_vec(s.out_dim * s.in_dim, rng);
    const auto b = random_vec(s.out_dim, rng);
    std::vector<double> y1(s.batch * s.out_dim), y2(s.batch * s.out_dim);
    k::dense_forward(s, x, w, b, y1);
    k::dense_forward(s, x, w, b, y2);
    CHECK(y1 == y2);
}

TEST_SUITE_END();
