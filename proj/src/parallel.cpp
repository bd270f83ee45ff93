#include "gamma_lab/parallel.hpp"

#include <cstdlib>
#include <string>

namespace gamma_lab {

unsigned resolve_threads(std::optional<unsigned> requested) {
  if (requested && *requested > 0) return *requested;
  if (const char* env = std::getenv("GAMMA_LAB_THREADS"); env != nullptr && *env != '\0') {
    try {
      const unsigned long v = std::stoul(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
      // fall through to the hardware default
    }
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

MeanEstimate mean_estimate(std::span<const double> values) {
  MeanEstimate out;
  out.n = values.size();
  if (values.empty()) return out;
  CompensatedSum sum;
  for (double v : values) sum.add(v);
  out.mean = sum.value() / static_cast<double>(values.size());
  CompensatedSum sq;
  for (double v : values) sq.add((v - out.mean) * (v - out.mean));
  if (values.size() > 1) {
    const double var = sq.value() / static_cast<double>(values.size() - 1);
    out.standard_error = std::sqrt(var / static_cast<double>(values.size()));
  }
  return out;
}

}  // namespace gamma_lab
