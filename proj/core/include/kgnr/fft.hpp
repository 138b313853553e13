#pragma once

#include <complex>

namespace kgnr::fft {

// In-place, unnormalized 2-D complex-to-complex transforms of an n x n
// row-major array.
//
// Plans are cached per (n, direction). Plan creation is serialized (the FFTW
// planner is not thread-safe); execution uses the new-array interface on the
// caller's buffer and is safe to run concurrently. Plans are created with
// FFTW_UNALIGNED so any caller buffer qualifies.
void forward(int n, std::complex<double>* data);   // exponent e^{-2 pi i jk/n}
void backward(int n, std::complex<double>* data);  // exponent e^{+2 pi i jk/n}

} // namespace kgnr::fft
