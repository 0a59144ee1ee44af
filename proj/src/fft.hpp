#pragma once

#include <span>

#include "radsr/common.hpp"

namespace radsr::detail {

/// In-place unnormalized forward DFT, X[k] = sum_n x[n] exp(-2*pi*i*k*n/N).
void fft_forward(std::span<cplx> data);

}  // namespace radsr::detail
