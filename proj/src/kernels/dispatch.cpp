#include <atomic>

#include "vtube/error.hpp"
#include "vtube/kernels/nearest_segment.hpp"

namespace vtube::kernels {

namespace {

Backend detect() {
#if defined(VTUBE_KERNEL_AVX2)
  if (__builtin_cpu_supports("avx2")) return Backend::Avx2;
#endif
#if defined(VTUBE_KERNEL_NEON)
  return Backend::Neon;
#endif
  return Backend::Scalar;
}

std::atomic<int> forced{-1};

}  // namespace

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

bool backend_available(Backend backend) {
  switch (backend) {
    case Backend::Scalar: return true;
    case Backend::Avx2:
#if defined(VTUBE_KERNEL_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Backend::Neon:
#if defined(VTUBE_KERNEL_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Backend active_backend() {
  static const Backend detected = detect();
  const int f = forced.load(std::memory_order_relaxed);
  return f < 0 ? detected : static_cast<Backend>(f);
}

void force_backend(Backend backend) {
  if (!backend_available(backend)) {
    throw Error(ErrorKind::PreconditionViolation,
                "kernel backend not available on this CPU: " + std::string(to_string(backend)));
  }
  forced.store(static_cast<int>(backend), std::memory_order_relaxed);
}

void reset_backend() { forced.store(-1, std::memory_order_relaxed); }

NearestSegment nearest_segment(const SegmentView& segments, double qx, double qy) {
  switch (active_backend()) {
#if defined(VTUBE_KERNEL_AVX2)
    case Backend::Avx2: return nearest_segment_avx2(segments, qx, qy);
#endif
#if defined(VTUBE_KERNEL_NEON)
    case Backend::Neon: return nearest_segment_neon(segments, qx, qy);
#endif
    default: return nearest_segment_scalar(segments, qx, qy);
  }
}

}  // namespace vtube::kernels
