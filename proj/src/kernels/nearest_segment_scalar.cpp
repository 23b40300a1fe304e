#include "vtube/kernels/nearest_segment.hpp"

#include <limits>

namespace vtube::kernels {

NearestSegment nearest_segment_scalar(const SegmentView& s, double qx, double qy) {
  NearestSegment best{0, 0.0, std::numeric_limits<double>::infinity()};
  const std::size_t n = s.size();
  for (std::size_t k = 0; k < n; ++k) {
    double t = ((qx - s.ax[k]) * s.dx[k] + (qy - s.ay[k]) * s.dy[k]) * s.inv_len2[k];
    // Same select semantics as MAXPD/MINPD so the vector paths match bit for bit.
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
