#include "pucp/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace pucp {

namespace {

// FFTW planning is not thread-safe; plans are cached per (n, direction).
std::mutex plan_mutex;

fftw_plan get_plan(int n, bool inverse, fftw_complex* buf) {
  // In-place plans created with FFTW_ESTIMATE are reusable through
  // fftw_execute_dft on any aligned buffer of the same shape.
  static std::map<std::pair<int, bool>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto key = std::make_pair(n, inverse);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  fftw_plan p = fftw_plan_dft_2d(n, n, buf, buf, inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache[key] = p;
  return p;
}

} // namespace

void fft2(std::vector<complex_t>& data, int n, bool inverse) {
  require(static_cast<std::size_t>(n) * n == data.size(), "fft2: size mismatch");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan p = get_plan(n, inverse, buf);
  fftw_execute_dft(p, buf, buf);
  if (inverse) {
    const double scale = 1.0 / (static_cast<double>(n) * n);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(data.size()); ++i) data[i] *= scale;
  }
}

} // namespace pucp
