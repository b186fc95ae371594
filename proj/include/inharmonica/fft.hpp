#pragma once

#include "inharmonica/types.hpp"

namespace inharmonica {

// In-place complex DFT of arbitrary length (FFTW backend). The inverse is
// scaled by 1/N so that fft followed by ifft is the identity.
void fft(ComplexSeries& data, bool inverse = false);

// Discrete analytic signal of a real frame: one-sided spectrum with doubled
// interior positive bins (DC and Nyquist kept as-is). The real part of the
// result equals the input frame.
ComplexSeries analytic_signal(const std::vector<double>& frame);

// |DFT|^2 / N of the zero-padded series, length n_fft.
std::vector<double> periodogram(const ComplexSeries& frame, std::size_t n_fft);

}  // namespace inharmonica
