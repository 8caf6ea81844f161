#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "physmom/kernels.hpp"

// AVX2 kernels. Windowed ops vectorize across four adjacent windows (one per
// lane); each lane accumulates its own window oldest-first with separate mul
// and add, so results match the scalar reference bit-for-bit. fma is
// deliberately not used, it would change the rounding.

namespace physmom::kernels {

namespace {

void diff_avx2(const double* a, std::size_t n, double* out) {
    if (n < 2) return;
    const std::size_t m = n - 1;
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        const __m256d hi = _mm256_loadu_pd(a + i + 1);
        const __m256d lo = _mm256_loadu_pd(a + i);
        _mm256_storeu_pd(out + i, _mm256_sub_pd(hi, lo));
    }
    for (; i < m; ++i) out[i] = a[i + 1] - a[i];
}

void divide_avx2(const double* a, const double* b, std::size_t n, double* out) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_div_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] / b[i];
}

void reciprocal_avx2(const double* a, std::size_t n, double* out) {
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_div_pd(one, _mm256_loadu_pd(a + i)));
    for (; i < n; ++i) out[i] = 1.0 / a[i];
}

void ratio_minus_one_avx2(const double* a, const double* b, std::size_t n, double* out) {
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d q = _mm256_div_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        _mm256_storeu_pd(out + i, _mm256_sub_pd(q, one));
    }
    for (; i < n; ++i) out[i] = a[i] / b[i] - 1.0;
}

void window_sum_avx2(const double* x, std::size_t n, std::size_t k, double* out) {
    if (n < k) return;
    const std::size_t outs = n - k + 1;
    std::size_t t = 0;
    for (; t + 4 <= outs; t += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t i = 0; i < k; ++i)
            acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + t + i));
        _mm256_storeu_pd(out + t, acc);
    }
    for (; t < outs; ++t) {
        double acc = 0.0;
        for (std::size_t i = 0; i < k; ++i) acc += x[t + i];
        out[t] = acc;
    }
}

void window_dot_avx2(const double* m, const double* v, std::size_t n, std::size_t k,
                     double* out) {
    if (n < k) return;
    const std::size_t outs = n - k + 1;
    std::size_t t = 0;
    for (; t + 4 <= outs; t += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t i = 0; i < k; ++i) {
            const __m256d prod =
                _mm256_mul_pd(_mm256_loadu_pd(m + t + i), _mm256_loadu_pd(v + t + i));
            acc = _mm256_add_pd(acc, prod);
        }
        _mm256_storeu_pd(out + t, acc);
    }
    for (; t < outs; ++t) {
        double acc = 0.0;
        for (std::size_t i = 0; i < k; ++i) acc += m[t + i] * v[t + i];
        out[t] = acc;
    }
}

void window_mean_sstd_avx2(const double* x, std::size_t n, std::size_t k, double* mean_out,
                           double* sstd_out) {
    if (n < k) return;
    const std::size_t outs = n - k + 1;
    const __m256d vk = _mm256_set1_pd(static_cast<double>(k));
    const __m256d vk1 = _mm256_set1_pd(static_cast<double>(k - 1));
    std::size_t t = 0;
    for (; t + 4 <= outs; t += 4) {
        __m256d s = _mm256_setzero_pd();
        for (std::size_t i = 0; i < k; ++i) s = _mm256_add_pd(s, _mm256_loadu_pd(x + t + i));
        const __m256d mean = _mm256_div_pd(s, vk);
        __m256d s2 = _mm256_setzero_pd();
        for (std::size_t i = 0; i < k; ++i) {
            const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + t + i), mean);
            s2 = _mm256_add_pd(s2, _mm256_mul_pd(d, d));
        }
        _mm256_storeu_pd(mean_out + t, mean);
        _mm256_storeu_pd(sstd_out + t, _mm256_sqrt_pd(_mm256_div_pd(s2, vk1)));
    }
    for (; t < outs; ++t) {
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

const KernelTable& avx2_table() {
    static const KernelTable table = {
        diff_avx2,       divide_avx2,     reciprocal_avx2,
        ratio_minus_one_avx2, window_sum_avx2, window_dot_avx2,
        window_mean_sstd_avx2,
    };
    return table;
}

} // namespace physmom::kernels

#endif // x86-64
