#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <stdexcept>

namespace restrictlab::fft {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void transform(std::span<const std::size_t> sizes, std::vector<std::complex<double>>& data, int sign,
               std::size_t threads) {
  std::size_t cells = 1;
  std::vector<int> n;
  for (auto s : sizes) {
    cells *= s;
    n.push_back(static_cast<int>(s));
  }
  if (cells != data.size()) throw std::invalid_argument("fft: data size does not match the axis sizes");
  if (cells == 0) return;
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    static const bool threads_ready = fftw_init_threads() != 0;
    fftw_plan_with_nthreads(threads_ready ? static_cast<int>(std::max<std::size_t>(1, threads)) : 1);
    plan = fftw_plan_dft(static_cast<int>(n.size()), n.data(), buf, buf, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                         FFTW_ESTIMATE);
    fftw_plan_with_nthreads(1);
  }
  if (!plan) throw std::runtime_error("fft: planning failed");
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace restrictlab::fft
