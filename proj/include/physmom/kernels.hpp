#pragma once

#include <cstddef>
#include <string>

namespace physmom::kernels {

// Columnar inner loops behind the signal engine. Every op has a scalar
// reference kernel and an AVX2 variant selected at runtime; the vector
// variants assign one output element per lane and keep the per-window
// accumulation order identical to the scalar code (oldest term first, no
// fma), so all backends produce bit-identical results. The equivalence
// suite in tests/ asserts exactly that.

struct KernelTable {
    // out[i] = a[i+1] - a[i], for i in [0, n-1)
    void (*diff)(const double* a, std::size_t n, double* out);
    // out[i] = a[i] / b[i]
    void (*divide)(const double* a, const double* b, std::size_t n, double* out);
    // out[i] = 1.0 / a[i]
    void (*reciprocal)(const double* a, std::size_t n, double* out);
    // out[i] = a[i]/b[i] - 1.0
    void (*ratio_minus_one)(const double* a, const double* b, std::size_t n, double* out);
    // Windowed reductions over every length-k window of x (n >= k >= 1):
    // out[t] covers x[t .. t+k-1], giving n-k+1 outputs.
    void (*window_sum)(const double* x, std::size_t n, std::size_t k, double* out);
    void (*window_dot)(const double* m, const double* v, std::size_t n, std::size_t k,
                       double* out);
    // Per-window mean and sample standard deviation (divisor k-1, k >= 2),
    // two-pass.
    void (*window_mean_sstd)(const double* x, std::size_t n, std::size_t k, double* mean_out,
                             double* sstd_out);
};

enum class Backend { scalar, avx2 };

bool cpu_supports_avx2();

/// Table for the best backend the CPU supports (cached after first call).
const KernelTable& active();

/// The currently selected backend.
Backend active_backend();

/// Force a specific backend (tests). Throws std::runtime_error if the CPU
/// lacks it.
void force_backend(Backend b);

const KernelTable& scalar_table();
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table();
#endif

std::string backend_name(Backend b);

} // namespace physmom::kernels
