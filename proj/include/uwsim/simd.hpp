#pragma once

// Batch geometry kernels used by the transmit pipeline and the mobility model.
// Each kernel has a scalar reference and, on x86-64, an AVX2 variant picked at
// runtime. Variants are required to produce bit-identical output so that
// simulation traces do not depend on the host CPU.

#include <span>
#include <string_view>

#include "uwsim/types.hpp"

namespace uwsim::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;

/// Best ISA supported by this CPU and build.
Isa detected_isa() noexcept;

/// ISA the dispatching entry points currently use. Defaults to detected_isa(),
/// or scalar when the environment variable UWSIM_SIMD=scalar is set.
Isa active_isa() noexcept;

/// Override dispatch (tests). Requests for an unsupported ISA fall back to scalar.
void set_active_isa(Isa isa) noexcept;

/// Structure-of-arrays view over node positions.
struct PositionsView {
    std::span<const double> x;
    std::span<const double> y;
    std::span<const double> z;
};

struct MutablePositions {
    std::span<double> x;
    std::span<double> y;
    std::span<double> z;
};

/// out[i] = |p_i - origin|^2, evaluated as dx*dx + dy*dy + dz*dz.
void squared_distances(PositionsView positions, const Vec3& origin, std::span<double> out);

/// p += v * dt per axis, reflecting off the box faces (position mirrored, velocity
/// component negated). Assumes |v * dt| is smaller than the box extent.
void advance_positions(MutablePositions positions, MutablePositions velocities, double dt, const Box& box);

namespace scalar {
void squared_distances(PositionsView positions, const Vec3& origin, std::span<double> out);
void advance_positions(MutablePositions positions, MutablePositions velocities, double dt, const Box& box);
}  // namespace scalar

#if defined(UWSIM_HAVE_AVX2)
namespace avx2 {
void squared_distances(PositionsView positions, const Vec3& origin, std::span<double> out);
void advance_positions(MutablePositions positions, MutablePositions velocities, double dt, const Box& box);
}  // namespace avx2
#endif

}  // namespace uwsim::simd
