#pragma once

#include <complex>
#include <cstddef>

namespace intloc {

// In-place radix-2 transforms; n must be a power of two. Forward uses the
// e^{-2 pi i j k / n} kernel; inverse includes the 1/n scale.

// Reference implementation: per-butterfly twiddles from std::polar, no tables,
// no threading. Kept for correctness tests and benchmarks.
void fft_serial(std::complex<double>* a, std::size_t n, bool inverse);

// Table-driven version, OpenMP-parallel across independent butterfly blocks.
// Output is bit-identical for any thread count (no reductions, disjoint writes).
void fft_parallel(std::complex<double>* a, std::size_t n, bool inverse);

std::size_t fft_pad_size(std::size_t need);
bool is_pow2(std::size_t n);

}  // namespace intloc
