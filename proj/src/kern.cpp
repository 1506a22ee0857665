#include "focklab/kern.hpp"
#include "focklab/errors.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace focklab::kern {

const Ops* avx2_ops_impl(); // defined in kern_avx2.cpp

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Ops* avx2_ops() {
    if (!avx2_supported()) return nullptr;
    return avx2_ops_impl();
}

namespace {

std::atomic<const Ops*> g_active{nullptr};

const Ops* select_default() {
    if (const char* env = std::getenv("FOCKLAB_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return &scalar_ops();
        if (std::strcmp(env, "avx2") == 0 && avx2_ops()) return avx2_ops();
        // unrecognized or unavailable: fall through to auto selection
    }
    if (const Ops* v = avx2_ops()) return v;
    return &scalar_ops();
}

} // namespace

const Ops& ops() {
    const Ops* p = g_active.load(std::memory_order_acquire);
    if (!p) {
        p = select_default();
        g_active.store(p, std::memory_order_release);
    }
    return *p;
}

void force_variant(const char* name) {
    if (std::strcmp(name, "scalar") == 0) {
        g_active.store(&scalar_ops(), std::memory_order_release);
        return;
    }
    if (std::strcmp(name, "avx2") == 0) {
        if (const Ops* v = avx2_ops()) {
            g_active.store(v, std::memory_order_release);
            return;
        }
        throw BadParams("avx2 kernels not available on this machine");
    }
    throw BadParams(std::string("unknown kernel variant: ") + name);
}

} // namespace focklab::kern
