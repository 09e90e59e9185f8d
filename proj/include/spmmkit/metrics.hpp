#pragma once

#include <cmath>

#include "spmmkit/kernel_id.hpp"
#include "spmmkit/types.hpp"

namespace spmmkit {

/// min(timings) / timings[chosen] — 1.0 when the choice ties the fastest
/// kernel, smaller the further it falls behind. Scale-invariant.
inline double normalized_performance(std::span<const double> timings, KernelId chosen) {
    if (timings.size() != static_cast<std::size_t>(kNumKernels))
        throw std::invalid_argument("normalized_performance: need " +
                                    std::to_string(kNumKernels) + " timings, got " +
                                    std::to_string(timings.size()));
    double best = timings[0];
    for (double t : timings) {
        if (!(t > 0) || !std::isfinite(t))
            throw std::invalid_argument("normalized_performance: timings must be finite and > 0");
        best = std::min(best, t);
    }
    return best / timings[chosen.index()];
}

/// Geometric mean, the right aggregate for ratios like normalized
/// performance: exp(mean(log v)).
inline double average_normalized(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("average_normalized: empty input");
    double log_sum = 0;
    for (double v : values) {
        if (!(v > 0)) throw std::invalid_argument("average_normalized: values must be > 0");
        log_sum += std::log(v);
    }
    return std::exp(log_sum / static_cast<double>(values.size()));
}

}  // namespace spmmkit
