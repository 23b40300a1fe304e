// Compiled with -mavx2 (no -mfma); only reached after a runtime CPU check.
#include "vtube/kernels/nearest_segment.hpp"

#include <immintrin.h>

#include <limits>

namespace vtube::kernels {

NearestSegment nearest_segment_avx2(const SegmentView& s, double qx, double qy) {
  const std::size_t n = s.size();
  const std::size_t blocked = n - n % 4;

  const __m256d vqx = _mm256_set1_pd(qx);
  const __m256d vqy = _mm256_set1_pd(qy);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d four = _mm256_set1_pd(4.0);

  __m256d best_d2 = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  __m256d best_t = zero;
  __m256d best_idx = zero;
  __m256d idx = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);

  for (std::size_t k = 0; k < blocked; k += 4) {
    const __m256d ax = _mm256_loadu_pd(s.ax.data() + k);
    const __m256d ay = _mm256_loadu_pd(s.ay.data() + k);
    const __m256d dx = _mm256_loadu_pd(s.dx.data() + k);
    const __m256d dy = _mm256_loadu_pd(s.dy.data() + k);
    const __m256d inv = _mm256_loadu_pd(s.inv_len2.data() + k);

    const __m256d num = _mm256_add_pd(_mm256_mul_pd(_mm256_sub_pd(vqx, ax), dx),
                                      _mm256_mul_pd(_mm256_sub_pd(vqy, ay), dy));
    __m256d t = _mm256_mul_pd(num, inv);
    t = _mm256_max_pd(t, zero);
    t = _mm256_min_pd(t, one);

    const __m256d ex = _mm256_sub_pd(vqx, _mm256_add_pd(ax, _mm256_mul_pd(t, dx)));
    const __m256d ey = _mm256_sub_pd(vqy, _mm256_add_pd(ay, _mm256_mul_pd(t, dy)));
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(ex, ex), _mm256_mul_pd(ey, ey));

    const __m256d better = _mm256_cmp_pd(d2, best_d2, _CMP_LT_OQ);
    best_d2 = _mm256_blendv_pd(best_d2, d2, better);
    best_t = _mm256_blendv_pd(best_t, t, better);
    best_idx = _mm256_blendv_pd(best_idx, idx, better);
    idx = _mm256_add_pd(idx, four);
  }

  alignas(32) double lane_d2[4];
  alignas(32) double lane_t[4];
  alignas(32) double lane_idx[4];
  _mm256_store_pd(lane_d2, best_d2);
  _mm256_store_pd(lane_t, best_t);
  _mm256_store_pd(lane_idx, best_idx);

  NearestSegment best{0, 0.0, std::numeric_limits<double>::infinity()};
  for (int lane = 0; lane < 4; ++lane) {
    const auto lane_index = static_cast<std::size_t>(lane_idx[lane]);
    if (lane_d2[lane] < best.distance_sq ||
        (lane_d2[lane] == best.distance_sq && lane_index < best.index)) {
      best = {lane_index, lane_t[lane], lane_d2[lane]};
    }
  }

  for (std::size_t k = blocked; k < n; ++k) {
    double t = ((qx - s.ax[k]) * s.dx[k] + (qy - s.ay[k]) * s.dy[k]) * s.inv_len2[k];
    t = (t > 0.0) ? t : 0.0;
    t = (t < 1.0) ? t : 1.0;
    const double ex = qx - (s.ax[k] + t * s.dx[k]);
    const double ey = qy - (s.ay[k] + t * s.dy[k]);
    const double d2 = ex * ex + ey * ey;
    if (d2 < best.distance_sq) best = {k, t, d2};
  }
  return best;
}

}  // namespace vtube::kernels
