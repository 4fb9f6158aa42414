#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>

namespace dendro {

/// Worker count: the override if set, else DENDRO_MLE_THREADS (0 or unset = hardware concurrency).
std::size_t thread_count();
void set_thread_count(std::optional<std::size_t> threads);

/// Calls body(i) for i in [0, count). Calls nested inside a worker run serially.
/// Results must be written to per-index slots; the first exception by index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// log(sum exp(v)) by a fixed pairwise reduction tree; -inf for an empty span.
double log_sum_exp(std::span<const double> values);
/// log(mean exp(v)).
double log_mean_exp(std::span<const double> values);

}  // namespace dendro
