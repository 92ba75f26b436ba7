#pragma once

#include <cstddef>
#include <cstdint>

#include "intloc/distributions.hpp"
#include "intloc/edgeworth.hpp"
#include "intloc/grid_pmf.hpp"

namespace intloc {

enum class ErrorKind { discretization, confidence, bracket };

const char* error_kind_name(ErrorKind k);

// An estimate of P(S_n in [x, x + delta)) with an attached certificate.
// value is clipped to [0, 1]; value +- error_half_width always intersects [0, 1].
struct OracleEstimate {
  double value = 0.0;
  ErrorKind error_kind = ErrorKind::discretization;
  double error_half_width = 0.0;
};

// Window sum over a precomputed S_n grid. Certificate:
// (2h/delta) * value + tail deficit (boundary-cell split plus trimmed mass).
OracleEstimate interval_prob_from_pmf(const GridPmf& pmf,
                                      const PmfWindowSummer& summer,
                                      const IntervalQuery& q);

// Fine-grid convolution oracle: builds the S_n grid at pitch h, then sums
// the window. Deterministic; error_kind = discretization.
OracleEstimate interval_prob_fft(const Distribution& dist,
                                 const IntervalQuery& q, double h);

// Monte Carlo oracle. value = hit fraction; half-width is the 95% Wald
// interval with a continuity floor of 1.96/(2*samples). Bit-identical output
// for a fixed seed at any thread count (blocked sub-streams).
OracleEstimate interval_prob_mc(const Distribution& dist,
                                const IntervalQuery& q, std::size_t samples,
                                std::uint64_t seed);

}  // namespace intloc
