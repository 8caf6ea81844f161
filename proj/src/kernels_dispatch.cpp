#include <atomic>
#include <stdexcept>

#include "physmom/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <cpuid.h>
#endif

namespace physmom::kernels {

namespace {

#if defined(__x86_64__) || defined(_M_X64)
bool detect_avx2() {
    unsigned eax, ebx, ecx, edx;
    if (!__get_cpuid(1, &eax, &ebx, &ecx, &edx)) return false;
    const bool osxsave = (ecx & (1u << 27)) != 0;
    const bool avx = (ecx & (1u << 28)) != 0;
    if (!osxsave || !avx) return false;
    // OS must enable XMM+YMM state (XCR0 bits 1 and 2).
    unsigned lo, hi;
    __asm__ volatile("xgetbv" : "=a"(lo), "=d"(hi) : "c"(0));
    if ((lo & 0x6) != 0x6) return false;
    if (__get_cpuid_max(0, nullptr) < 7) return false;
    __cpuid_count(7, 0, eax, ebx, ecx, edx);
    return (ebx & (1u << 5)) != 0;
}
#else
bool detect_avx2() { return false; }
#endif

std::atomic<Backend> g_backend{cpu_supports_avx2() ? Backend::avx2 : Backend::scalar};

} // namespace

bool cpu_supports_avx2() {
    static const bool has = detect_avx2();
    return has;
}

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

const KernelTable& active() {
#if defined(__x86_64__) || defined(_M_X64)
    if (active_backend() == Backend::avx2) return avx2_table();
#endif
    return scalar_table();
}

void force_backend(Backend b) {
    if (b == Backend::avx2 && !cpu_supports_avx2())
        throw std::runtime_error("avx2 backend requested but CPU does not support it");
    g_backend.store(b, std::memory_order_relaxed);
}

std::string backend_name(Backend b) {
    return b == Backend::avx2 ? "avx2" : "scalar";
}

} // namespace physmom::kernels
