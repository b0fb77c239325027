#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "curvestream/engine.hpp"

namespace curvestream {

// One StepTrace as a single-line JSON object with the fields, in order:
//   t, id, M, C, CS, mu, sigma, g1, g2, state, forced, evicted, queue_len,
//   tokens_total
// M/C/CS are null for the unscored first frame and g1/g2 are null whenever no
// thresholds were computed. `sigma` is the standard deviation. `state` is one
// of Clear, Blurred, Discard, or Warmup for an unrouted first frame.
std::string trace_to_json(const StepTrace& trace);

// Writes one line per trace.
void write_trace(std::ostream& out, std::span<const StepTrace> traces);

}  // namespace curvestream
