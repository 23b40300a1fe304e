#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vtube/geometry.hpp"
#include "vtube/kernels/nearest_segment.hpp"

namespace vtube {

struct TubeSample {
  double l{0.0};  // arc parameter in [0, 1]
  Vec2 center;
  double half_width{0.0};
};

struct TubeProjection {
  double l_star{0.0};
  Vec2 closest;
  Vec2 tangent;
  double half_width{0.0};
  Vec2 midpoint;
  double boundary_distance{0.0};
  double arc{0.0};  // centerline arc length from the start terminal to `closest`
  std::size_t segment{0};
  // Exact gradient of half_width(q) for the piecewise-linear tube: the
  // segment slope along its direction, zero when the foot is clamped to a vertex.
  Vec2 half_width_gradient;
};

/// Planar virtual tube: a uniformly resampled centerline (the generator curve)
/// carrying a half-width per sample. Cross-sections are normal segments of
/// length 2 * half_width centered on the centerline; the boundary is excluded.
///
/// Immutable after construction, so concurrent queries are safe.
class Tube {
 public:
  static constexpr double kDefaultGradientStep = 0.01;

  /// Resamples `centerline` at `resample_count` arc-uniform points; half-widths
  /// are interpolated linearly in arc length.
  /// Throws DegenerateCenterline (total length < 1e-9), NonPositiveWidth,
  /// PreconditionViolation (size mismatch, fewer than two points or samples).
  static Tube build(std::span<const Vec2> centerline, std::span<const double> half_widths,
                    std::size_t resample_count);

  TubeProjection project(Vec2 q) const;

  /// Central finite difference of half_width(project(q)) with step h.
  Vec2 width_gradient(Vec2 q, double h = kDefaultGradientStep) const;

  bool contains(Vec2 q) const { return project(q).boundary_distance > 0.0; }

  double length() const { return arc_lengths_.back(); }
  double min_half_width() const;
  const std::vector<TubeSample>& samples() const { return samples_; }
  std::span<const double> arc_lengths() const { return arc_lengths_; }

 private:
  Tube() = default;
  kernels::SegmentView segment_view() const;
  Vec2 segment_direction(std::size_t k) const;

  std::vector<TubeSample> samples_;
  std::vector<double> arc_lengths_;
  // Segment table in structure-of-arrays form for the nearest-segment kernel.
  std::vector<double> ax_, ay_, dx_, dy_, inv_len2_, len_;
};

}  // namespace vtube
