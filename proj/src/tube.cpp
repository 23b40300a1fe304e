#include "vtube/tube.hpp"

#include <algorithm>
#include <cmath>

#include "vtube/error.hpp"

namespace vtube {

Tube Tube::build(std::span<const Vec2> centerline, std::span<const double> half_widths,
                 std::size_t resample_count) {
  require(centerline.size() >= 2, ErrorKind::PreconditionViolation,
          "tube centerline needs at least two points");
  require(half_widths.size() == centerline.size(), ErrorKind::PreconditionViolation,
          "half_widths must have one entry per centerline point");
  require(resample_count >= 2, ErrorKind::PreconditionViolation,
          "resample_count must be at least 2");
  for (const Vec2& p : centerline) {
    require(is_finite(p), ErrorKind::PreconditionViolation, "centerline point is not finite");
  }
  for (double w : half_widths) {
    require(std::isfinite(w) && w > 0.0, ErrorKind::NonPositiveWidth,
            "every half-width must be positive");
  }

  std::vector<double> input_arc(centerline.size(), 0.0);
  for (std::size_t i = 1; i < centerline.size(); ++i) {
    input_arc[i] = input_arc[i - 1] + norm(centerline[i] - centerline[i - 1]);
  }
  const double total = input_arc.back();
  require(total >= 1e-9, ErrorKind::DegenerateCenterline, "centerline has zero length");

  Tube tube;
  tube.samples_.reserve(resample_count);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < resample_count; ++k) {
    const double s = (k + 1 == resample_count)
                         ? total
                         : total * static_cast<double>(k) / static_cast<double>(resample_count - 1);
    while (seg + 2 < centerline.size() && input_arc[seg + 1] < s) ++seg;
    const double seg_len = input_arc[seg + 1] - input_arc[seg];
    const double u = seg_len > 0.0 ? std::clamp((s - input_arc[seg]) / seg_len, 0.0, 1.0) : 0.0;
    const Vec2 center = centerline[seg] + u * (centerline[seg + 1] - centerline[seg]);
    const double width = half_widths[seg] + u * (half_widths[seg + 1] - half_widths[seg]);
    tube.samples_.push_back({0.0, center, width});
  }

  const std::size_t nseg = resample_count - 1;
  tube.arc_lengths_.assign(resample_count, 0.0);
  tube.ax_.resize(nseg);
  tube.ay_.resize(nseg);
  tube.dx_.resize(nseg);
  tube.dy_.resize(nseg);
  tube.inv_len2_.resize(nseg);
  tube.len_.resize(nseg);
  for (std::size_t k = 0; k < nseg; ++k) {
    const Vec2 a = tube.samples_[k].center;
    const Vec2 d = tube.samples_[k + 1].center - a;
    const double len2 = dot(d, d);
    require(len2 > 1e-24, ErrorKind::DegenerateCenterline,
            "resampled centerline has coincident consecutive samples");
    tube.ax_[k] = a.x;
    tube.ay_[k] = a.y;
    tube.dx_[k] = d.x;
    tube.dy_[k] = d.y;
    tube.inv_len2_[k] = 1.0 / len2;
    tube.len_[k] = std::sqrt(len2);
    tube.arc_lengths_[k + 1] = tube.arc_lengths_[k] + tube.len_[k];
  }
  const double resampled_total = tube.arc_lengths_.back();
  for (std::size_t k = 0; k < resample_count; ++k) {
    tube.samples_[k].l = tube.arc_lengths_[k] / resampled_total;
  }
  tube.samples_.front().l = 0.0;
  tube.samples_.back().l = 1.0;
  return tube;
}

kernels::SegmentView Tube::segment_view() const {
  return {ax_, ay_, dx_, dy_, inv_len2_};
}

Vec2 Tube::segment_direction(std::size_t k) const {
  return Vec2{dx_[k], dy_[k]} / len_[k];
}

double Tube::min_half_width() const {
  double w = samples_.front().half_width;
  for (const auto& s : samples_) w = std::min(w, s.half_width);
  return w;
}

TubeProjection Tube::project(Vec2 q) const {
  const kernels::NearestSegment hit = kernels::nearest_segment(segment_view(), q.x, q.y);
  const std::size_t k = hit.index;
  const double t = hit.t;
  const std::size_t last = len_.size() - 1;

  TubeProjection p;
  p.segment = k;
  p.closest = Vec2{ax_[k], ay_[k]} + t * Vec2{dx_[k], dy_[k]};
  p.midpoint = p.closest;
  p.l_star = samples_[k].l + t * (samples_[k + 1].l - samples_[k].l);
  p.arc = arc_lengths_[k] + t * len_[k];
  p.half_width = samples_[k].half_width + t * (samples_[k + 1].half_width - samples_[k].half_width);

  Vec2 tangent = segment_direction(k);
  if (t <= 0.0 && k > 0) {
    tangent = tangent + segment_direction(k - 1);
  } else if (t >= 1.0 && k < last) {
    tangent = tangent + segment_direction(k + 1);
  }
  const double tn = norm(tangent);
  p.tangent = tn > 1e-12 ? tangent / tn : segment_direction(k);
  p.boundary_distance = p.half_width - norm(q - p.midpoint);
  if (t > 0.0 && t < 1.0) {
    const double slope = (samples_[k + 1].half_width - samples_[k].half_width) / len_[k];
    p.half_width_gradient = slope * segment_direction(k);
  }
  return p;
}

Vec2 Tube::width_gradient(Vec2 q, double h) const {
  require(h > 0.0, ErrorKind::PreconditionViolation, "gradient step must be positive");
  const double wxp = project(q + Vec2{h, 0.0}).half_width;
  const double wxm = project(q - Vec2{h, 0.0}).half_width;
  const double wyp = project(q + Vec2{0.0, h}).half_width;
  const double wym = project(q - Vec2{0.0, h}).half_width;
  return {(wxp - wxm) / (2.0 * h), (wyp - wym) / (2.0 * h)};
}

}  // namespace vtube
