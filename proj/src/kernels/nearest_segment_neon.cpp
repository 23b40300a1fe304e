#include "vtube/kernels/nearest_segment.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <limits>

namespace vtube::kernels {

// vmaxq/vminq follow IEEE maxNum and differ from the scalar select on signed
// zeros, so the clamp is written as compare + bit-select.
NearestSegment nearest_segment_neon(const SegmentView& s, double qx, double qy) {
  const std::size_t n = s.size();
  const std::size_t blocked = n - n % 2;

  const float64x2_t vqx = vdupq_n_f64(qx);
  const float64x2_t vqy = vdupq_n_f64(qy);
  const float64x2_t zero = vdupq_n_f64(0.0);
  const float64x2_t one = vdupq_n_f64(1.0);
  const float64x2_t two = vdupq_n_f64(2.0);

  float64x2_t best_d2 = vdupq_n_f64(std::numeric_limits<double>::infinity());
  float64x2_t best_t = zero;
  float64x2_t best_idx = zero;
  const double idx_init[2] = {0.0, 1.0};
  float64x2_t idx = vld1q_f64(idx_init);

  for (std::size_t k = 0; k < blocked; k += 2) {
    const float64x2_t ax = vld1q_f64(s.ax.data() + k);
    const float64x2_t ay = vld1q_f64(s.ay.data() + k);
    const float64x2_t dx = vld1q_f64(s.dx.data() + k);
    const float64x2_t dy = vld1q_f64(s.dy.data() + k);
    const float64x2_t inv = vld1q_f64(s.inv_len2.data() + k);

    const float64x2_t num =
        vaddq_f64(vmulq_f64(vsubq_f64(vqx, ax), dx), vmulq_f64(vsubq_f64(vqy, ay), dy));
    float64x2_t t = vmulq_f64(num, inv);
    t = vbslq_f64(vcgtq_f64(t, zero), t, zero);
    t = vbslq_f64(vcltq_f64(t, one), t, one);

    const float64x2_t ex = vsubq_f64(vqx, vaddq_f64(ax, vmulq_f64(t, dx)));
    const float64x2_t ey = vsubq_f64(vqy, vaddq_f64(ay, vmulq_f64(t, dy)));
    const float64x2_t d2 = vaddq_f64(vmulq_f64(ex, ex), vmulq_f64(ey, ey));

    const uint64x2_t better = vcltq_f64(d2, best_d2);
    best_d2 = vbslq_f64(better, d2, best_d2);
    best_t = vbslq_f64(better, t, best_t);
    best_idx = vbslq_f64(better, idx, best_idx);
    idx = vaddq_f64(idx, two);
  }

  double lane_d2[2];
  double lane_t[2];
  double lane_idx[2];
  vst1q_f64(lane_d2, best_d2);
  vst1q_f64(lane_t, best_t);
  vst1q_f64(lane_idx, best_idx);

  NearestSegment best{0, 0.0, std::numeric_limits<double>::infinity()};
  for (int lane = 0; lane < 2; ++lane) {
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

#endif
