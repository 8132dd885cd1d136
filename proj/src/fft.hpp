#pragma once

#include <complex>
#include <cstddef>
#include <mutex>
#include <span>
#include <vector>

namespace restrictlab::fft {

// FFTW's planner is not thread safe; every plan create/destroy goes through this.
std::mutex& planner_mutex();

// In-place row-major multidimensional DFT. sign = -1 is FFTW_FORWARD, i.e.
// out(j) = sum_x in(x) exp(-2 pi i x.j / G), which is sum_x in(x) e(x.j/G).
void transform(std::span<const std::size_t> sizes, std::vector<std::complex<double>>& data, int sign,
               std::size_t threads = 1);

}  // namespace restrictlab::fft
