#include "curvestream/trace.hpp"

#include <cmath>
#include <ostream>

#include "curvestream/error.hpp"
#include "json.hpp"

namespace curvestream {

std::string trace_to_json(const StepTrace& trace) {
  nlohmann::ordered_json j;
  j["t"] = trace.timestamp;
  j["id"] = trace.frame_id;
  if (trace.score) {
    j["M"] = trace.score->motion;
    j["C"] = trace.score->curvature;
    j["CS"] = trace.score->score;
  } else {
    j["M"] = nullptr;
    j["C"] = nullptr;
    j["CS"] = nullptr;
  }
  j["mu"] = trace.distribution.mean;
  j["sigma"] = std::sqrt(trace.distribution.variance);
  if (trace.thresholds) {
    j["g1"] = trace.thresholds->g1;
    j["g2"] = trace.thresholds->g2;
  } else {
    j["g1"] = nullptr;
    j["g2"] = nullptr;
  }
  j["state"] = trace.decision ? std::string(to_string(trace.decision->state)) : "Warmup";
  j["forced"] = trace.decision ? trace.decision->forced_by_query : false;
  j["evicted"] = trace.evicted;
  j["queue_len"] = trace.queue_len;
  j["tokens_total"] = trace.tokens_total;
  return j.dump();
}

void write_trace(std::ostream& out, std::span<const StepTrace> traces) {
  for (const StepTrace& t : traces) out << trace_to_json(t) << '\n';
  out.flush();
  if (!out) throw IoError("trace write failed");
}

}  // namespace curvestream
