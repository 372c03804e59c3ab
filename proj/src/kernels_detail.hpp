#pragma once

// Per-element bodies shared by the serial and OpenMP kernels so both paths
// execute the same floating-point operations in the same order.

#include <algorithm>
#include <cmath>
#include <limits>

#include "lugeon/kernels.hpp"

namespace lugeon::kernels::detail {

inline std::size_t nearest(const Matrix& prototypes, std::span<const double> x) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < prototypes.rows(); ++k) {
        const auto p = prototypes.row(k);
        double d = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) d += (x[j] - p[j]) * (x[j] - p[j]);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

struct HitSums {
    Matrix sums;
    std::vector<double> counts;
};

inline HitSums hit_sums(const Matrix& data, std::span<const std::size_t> bmu, std::size_t neurons) {
    HitSums h{Matrix(neurons, data.cols()), std::vector<double>(neurons, 0.0)};
    for (std::size_t i = 0; i < data.rows(); ++i) {
        auto s = h.sums.row(bmu[i]);
        const auto x = data.row(i);
        for (std::size_t j = 0; j < x.size(); ++j) s[j] += x[j];
        h.counts[bmu[i]] += 1.0;
    }
    return h;
}

inline void update_neuron(std::size_t k, const Matrix& prototypes, const HitSums& h, const Matrix& neighborhood,
                          Matrix& out) {
    const std::size_t d = prototypes.cols();
    auto dst = out.row(k);
    std::fill(dst.begin(), dst.end(), 0.0);
    double den = 0.0;
    for (std::size_t c = 0; c < prototypes.rows(); ++c) {
        if (h.counts[c] == 0.0) continue;
        const double w = neighborhood(k, c);
        if (w == 0.0) continue;
        const auto s = h.sums.row(c);
        for (std::size_t j = 0; j < d; ++j) dst[j] += w * s[j];
        den += w * h.counts[c];
    }
    if (den > 0.0) {
        for (std::size_t j = 0; j < d; ++j) dst[j] /= den;
    } else {
        const auto src = prototypes.row(k);
        std::copy(src.begin(), src.end(), dst.begin());
    }
}

inline void discern_row(const CodeMatrix& t, std::span<const std::size_t> columns, std::size_t i, AttrMask* out) {
    for (std::size_t j = 0; j < i; ++j) {
        AttrMask m = 0;
        for (std::size_t b = 0; b < columns.size(); ++b)
            if (t(i, columns[b]) != t(j, columns[b])) m |= AttrMask{1} << b;
        out[j] = m;
    }
}

inline void firing_row(const Matrix& centers, const Matrix& sigmas, std::span<const double> u, std::span<double> out) {
    const std::size_t rules = centers.rows();
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < rules; ++r) {
        double lw = 0.0;
        for (std::size_t j = 0; j < u.size(); ++j) {
            const double z = (u[j] - centers(r, j)) / sigmas(r, j);
            lw -= 0.5 * z * z;
        }
        out[r] = lw;
        top = std::max(top, lw);
    }
    double total = 0.0;
    for (std::size_t r = 0; r < rules; ++r) {
        out[r] = std::exp(out[r] - top);
        total += out[r];
    }
    for (std::size_t r = 0; r < rules; ++r) out[r] /= total;
}

}  // namespace lugeon::kernels::detail
