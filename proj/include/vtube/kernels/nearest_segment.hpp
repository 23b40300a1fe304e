#pragma once

// Nearest-segment search over a polyline stored as structure-of-arrays.
//
// Every variant evaluates, per segment k,
//   t_k  = clamp(((qx - ax) * dx + (qy - ay) * dy) * inv_len2, 0, 1)
//   d2_k = (qx - (ax + t_k * dx))^2 + (qy - (ay + t_k * dy))^2
// with the same operation order and no fused multiply-add, and returns the
// lowest index attaining the minimum d2. The SIMD variants are therefore
// bit-identical to the scalar reference.

#include <cstddef>
#include <span>
#include <string_view>

namespace vtube::kernels {

struct SegmentView {
  std::span<const double> ax;
  std::span<const double> ay;
  std::span<const double> dx;
  std::span<const double> dy;
  std::span<const double> inv_len2;

  std::size_t size() const { return ax.size(); }
};

struct NearestSegment {
  std::size_t index{0};
  double t{0.0};
  double distance_sq{0.0};
};

enum class Backend { Scalar, Avx2, Neon };

std::string_view to_string(Backend backend);

// Reference implementation. Requires segments.size() >= 1.
NearestSegment nearest_segment_scalar(const SegmentView& segments, double qx, double qy);

#if defined(__x86_64__) || defined(_M_X64)
#define VTUBE_KERNEL_AVX2 1
NearestSegment nearest_segment_avx2(const SegmentView& segments, double qx, double qy);
#endif

#if defined(__aarch64__)
#define VTUBE_KERNEL_NEON 1
NearestSegment nearest_segment_neon(const SegmentView& segments, double qx, double qy);
#endif

/// True when the variant is compiled in and the running CPU supports it.
bool backend_available(Backend backend);

/// Best available backend, or the one forced via `force_backend`.
Backend active_backend();

/// Pins dispatch to `backend` (must be available). Used by tests and the CLI.
void force_backend(Backend backend);

/// Returns dispatch to automatic CPU detection.
void reset_backend();

/// Dispatches to the active backend.
NearestSegment nearest_segment(const SegmentView& segments, double qx, double qy);

}  // namespace vtube::kernels
