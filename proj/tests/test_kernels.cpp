#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lugeon/kernels.hpp"

using namespace lugeon;
using namespace lugeon::kernels;

namespace {

Matrix uniform(std::mt19937_64& rng, std::size_t n, std::size_t d) {
    std::uniform_real_distribution<double> u(0, 1);
    Matrix m(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) m(i, j) = u(rng);
    return m;
}

Matrix gaussian_neighborhood(std::size_t k, double sigma) {
    Matrix h(k, k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) {
            const double d = static_cast<double>(a) - static_cast<double>(b);
            h(a, b) = std::exp(-d * d / (2 * sigma * sigma));
        }
    return h;
}

}  // namespace

TEST(Kernels, BmuIdentical) {
    std::mt19937_64 rng(1);
    const auto protos = uniform(rng, 37, 5);
    const auto data = uniform(rng, 2000, 5);
    EXPECT_EQ(serial::assign_bmu(protos, data), omp::assign_bmu(protos, data));
}

TEST(Kernels, BmuTiesGoLow) {
    const Matrix protos(3, 1, std::vector<double>{0.2, 0.6, 0.2});
    const Matrix data(1, 1, std::vector<double>{0.2});
    EXPECT_EQ(serial::assign_bmu(protos, data)[0], 0u);
    EXPECT_EQ(omp::assign_bmu(protos, data)[0], 0u);
}

TEST(Kernels, SomEpochIdentical) {
    std::mt19937_64 rng(2);
    const auto protos = uniform(rng, 24, 4);
    const auto data = uniform(rng, 1500, 4);
    const auto h = gaussian_neighborhood(24, 2.0);
    EXPECT_EQ(serial::som_epoch(protos, data, h), omp::som_epoch(protos, data, h));
}

TEST(Kernels, SomEpochKeepsUnweightedNeurons) {
    const Matrix protos(2, 1, std::vector<double>{0.1, 0.9});
    const Matrix data(2, 1, std::vector<double>{0.0, 0.2});
    Matrix h(2, 2);
    h(0, 0) = 1.0;  // neuron 1 receives no weight from anything
    const auto next = serial::som_epoch(protos, data, h);
    EXPECT_DOUBLE_EQ(next(0, 0), 0.1);
    EXPECT_EQ(next(1, 0), 0.9);
}

TEST(Kernels, DiscernIdentical) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> c(1, 3);
    CodeMatrix t{300, 6, {}};
    for (std::size_t i = 0; i < 300 * 6; ++i) t.codes.push_back(c(rng));
    const std::vector<std::size_t> cols{0, 2, 3, 5};
    const auto a = serial::discern_cells(t, cols);
    EXPECT_EQ(a, omp::discern_cells(t, cols));
    ASSERT_EQ(a.size(), 300u * 299u / 2u);
    for (std::size_t i = 1; i < 300; i += 37)
        for (std::size_t j = 0; j < i; j += 11) {
            AttrMask expected = 0;
            for (std::size_t b = 0; b < cols.size(); ++b)
                if (t(i, cols[b]) != t(j, cols[b])) expected |= AttrMask{1} << b;
            EXPECT_EQ(a[cell_index(i, j)], expected);
        }
}

TEST(Kernels, FiringIdentical) {
    std::mt19937_64 rng(4);
    const auto centers = uniform(rng, 8, 3);
    auto sigmas = uniform(rng, 8, 3);
    for (std::size_t i = 0; i < 8; ++i) sigmas(i, 0) = 1e-6;
    const auto x = uniform(rng, 1000, 3);
    EXPECT_EQ(serial::normalized_firing(centers, sigmas, x), omp::normalized_firing(centers, sigmas, x));
}

TEST(Kernels, FillAndForEach) {
    std::vector<double> a(5000), b(5000);
    auto f = [](std::size_t i) { return std::sqrt(static_cast<double>(i)); };
    serial::fill(a, f);
    omp::fill(b, f);
    EXPECT_EQ(a, b);
    std::vector<int> hit(777, 0);
    omp::for_each_index(hit.size(), [&](std::size_t i) { hit[i] += 1; });
    for (int h : hit) EXPECT_EQ(h, 1);
}

TEST(Kernels, Dispatch) {
    std::mt19937_64 rng(5);
    const auto protos = uniform(rng, 5, 2);
    const auto data = uniform(rng, 50, 2);
    EXPECT_EQ(assign_bmu(protos, data, Exec::serial), assign_bmu(protos, data, Exec::parallel));
}
