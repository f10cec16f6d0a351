// AVX2 variants, 4 doubles per lane. Compiled with -mavx2 only; callers reach
// these through the dispatcher after a CPUID check.

#include <immintrin.h>

#include "uwsim/simd.hpp"

namespace uwsim::simd::avx2 {

void squared_distances(PositionsView positions, const Vec3& origin, std::span<double> out) {
    const std::size_t n = out.size();
    const __m256d ox = _mm256_set1_pd(origin.x);
    const __m256d oy = _mm256_set1_pd(origin.y);
    const __m256d oz = _mm256_set1_pd(origin.z);

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(&positions.x[i]), ox);
        const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(&positions.y[i]), oy);
        const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(&positions.z[i]), oz);
        // (dx*dx + dy*dy) + dz*dz, same association as the scalar loop
        const __m256d sum = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
                                          _mm256_mul_pd(dz, dz));
        _mm256_storeu_pd(&out[i], sum);
    }
    if (i < n) {
        scalar::squared_distances({positions.x.subspan(i), positions.y.subspan(i), positions.z.subspan(i)}, origin,
                                  out.subspan(i));
    }
}

namespace {

inline void advance_axis(double* p, double* v, __m256d dt, __m256d lo, __m256d hi) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d vel = _mm256_loadu_pd(v);
    __m256d next = _mm256_add_pd(_mm256_loadu_pd(p), _mm256_mul_pd(vel, dt));

    const __m256d over = _mm256_cmp_pd(next, hi, _CMP_GT_OQ);
    next = _mm256_blendv_pd(next, _mm256_sub_pd(_mm256_add_pd(hi, hi), next), over);
    vel = _mm256_blendv_pd(vel, _mm256_xor_pd(vel, sign), over);

    const __m256d under = _mm256_cmp_pd(next, lo, _CMP_LT_OQ);
    next = _mm256_blendv_pd(next, _mm256_sub_pd(_mm256_add_pd(lo, lo), next), under);
    vel = _mm256_blendv_pd(vel, _mm256_xor_pd(vel, sign), under);

    _mm256_storeu_pd(p, next);
    _mm256_storeu_pd(v, vel);
}

}  // namespace

void advance_positions(MutablePositions positions, MutablePositions velocities, double dt, const Box& box) {
    const std::size_t n = positions.x.size();
    const __m256d vdt = _mm256_set1_pd(dt);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        advance_axis(&positions.x[i], &velocities.x[i], vdt, _mm256_set1_pd(box.lo.x), _mm256_set1_pd(box.hi.x));
        advance_axis(&positions.y[i], &velocities.y[i], vdt, _mm256_set1_pd(box.lo.y), _mm256_set1_pd(box.hi.y));
        advance_axis(&positions.z[i], &velocities.z[i], vdt, _mm256_set1_pd(box.lo.z), _mm256_set1_pd(box.hi.z));
    }
    if (i < n) {
        scalar::advance_positions({positions.x.subspan(i), positions.y.subspan(i), positions.z.subspan(i)},
                                  {velocities.x.subspan(i), velocities.y.subspan(i), velocities.z.subspan(i)}, dt,
                                  box);
    }
}

}  // namespace uwsim::simd::avx2
