#include <cmath>
#include <cstddef>

#include "physmom/kernels.hpp"

// Reference kernels. These define the arithmetic contract: any other backend
// must reproduce them bit-for-bit.

namespace physmom::kernels {

namespace {

void diff_scalar(const double* a, std::size_t n, double* out) {
    for (std::size_t i = 0; i + 1 < n; ++i) out[i] = a[i + 1] - a[i];
}

void divide_scalar(const double* a, const double* b, std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] / b[i];
}

void reciprocal_scalar(const double* a, std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = 1.0 / a[i];
}

void ratio_minus_one_scalar(const double* a, const double* b, std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] / b[i] - 1.0;
}

void window_sum_scalar(const double* x, std::size_t n, std::size_t k, double* out) {
    for (std::size_t t = 0; t + k <= n; ++t) {
        double acc = 0.0;
        for (std::size_t i = 0; i < k; ++i) acc += x[t + i];
        out[t] = acc;
    }
}

void window_dot_scalar(const double* m, const double* v, std::size_t n, std::size_t k,
                       double* out) {
    for (std::size_t t = 0; t + k <= n; ++t) {
        double acc = 0.0;
        for (std::size_t i = 0; i < k; ++i) acc += m[t + i] * v[t + i];
        out[t] = acc;
    }
}

void window_mean_sstd_scalar(const double* x, std::size_t n, std::size_t k, double* mean_out,
                             double* sstd_out) {
    for (std::size_t t = 0; t + k <= n; ++t) {
        double s = 0.0;
        for (std::size_t i = 0; i < k; ++i) s += x[t + i];
        const double mean = s / static_cast<double>(k);
        double s2 = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double d = x[t + i] - mean;
            s2 += d * d;
        }
        mean_out[t] = mean;
        sstd_out[t] = std::sqrt(s2 / static_cast<double>(k - 1));
    }
}

} // namespace

const KernelTable& scalar_table() {
    static const KernelTable table = {
        diff_scalar,       divide_scalar,     reciprocal_scalar,
        ratio_minus_one_scalar, window_sum_scalar, window_dot_scalar,
        window_mean_sstd_scalar,
    };
    return table;
}

} // namespace physmom::kernels
