#include "uwsim/simd.hpp"

namespace uwsim::simd::scalar {

void squared_distances(PositionsView positions, const Vec3& origin, std::span<double> out) {
    const std::size_t n = out.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = positions.x[i] - origin.x;
        const double dy = positions.y[i] - origin.y;
        const double dz = positions.z[i] - origin.z;
        out[i] = dx * dx + dy * dy + dz * dz;
    }
}

namespace {

inline void advance_axis(double& p, double& v, double dt, double lo, double hi) {
    double next = p + v * dt;
    if (next > hi) {
        next = (hi + hi) - next;
        v = -v;
    }
    if (next < lo) {
        next = (lo + lo) - next;
        v = -v;
    }
    p = next;
}

}  // namespace

void advance_positions(MutablePositions positions, MutablePositions velocities, double dt, const Box& box) {
    const std::size_t n = positions.x.size();
    for (std::size_t i = 0; i < n; ++i) {
        advance_axis(positions.x[i], velocities.x[i], dt, box.lo.x, box.hi.x);
        advance_axis(positions.y[i], velocities.y[i], dt, box.lo.y, box.hi.y);
        advance_axis(positions.z[i], velocities.z[i], dt, box.lo.z, box.hi.z);
    }
}

}  // namespace uwsim::simd::scalar
