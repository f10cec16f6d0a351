#include <atomic>
#include <cstdlib>
#include <cstring>

#include "uwsim/simd.hpp"

namespace uwsim::simd {

namespace {

Isa initial_isa() noexcept {
    const char* forced = std::getenv("UWSIM_SIMD");
    if (forced != nullptr && std::strcmp(forced, "scalar") == 0) return Isa::scalar;
    return detected_isa();
}

std::atomic<Isa>& active() noexcept {
    static std::atomic<Isa> isa{initial_isa()};
    return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
    }
    return "unknown";
}

Isa detected_isa() noexcept {
#if defined(UWSIM_HAVE_AVX2)
    if (__builtin_cpu_supports("avx2")) return Isa::avx2;
#endif
    return Isa::scalar;
}

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) noexcept {
    if (isa == Isa::avx2 && detected_isa() != Isa::avx2) isa = Isa::scalar;
    active().store(isa, std::memory_order_relaxed);
}

void squared_distances(PositionsView positions, const Vec3& origin, std::span<double> out) {
#if defined(UWSIM_HAVE_AVX2)
    if (active_isa() == Isa::avx2) return avx2::squared_distances(positions, origin, out);
#endif
    scalar::squared_distances(positions, origin, out);
}

void advance_positions(MutablePositions positions, MutablePositions velocities, double dt, const Box& box) {
#if defined(UWSIM_HAVE_AVX2)
    if (active_isa() == Isa::avx2) return avx2::advance_positions(positions, velocities, dt, box);
#endif
    scalar::advance_positions(positions, velocities, dt, box);
}

}  // namespace uwsim::simd
