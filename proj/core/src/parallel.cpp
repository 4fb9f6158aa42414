#include "dendro/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace dendro {

namespace {

std::optional<std::size_t> g_override;
std::mutex g_override_mutex;
thread_local bool t_inside_worker = false;

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (const double x : v) {
            s += x;
        }
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace

std::size_t thread_count() {
    {
        std::lock_guard lock{g_override_mutex};
        if (g_override) {
            return std::max<std::size_t>(1, *g_override);
        }
    }
    std::size_t requested = 0;
    if (const char* env = std::getenv("DENDRO_MLE_THREADS")) {
        try {
            requested = static_cast<std::size_t>(std::stoul(env));
        } catch (const std::exception&) {
            requested = 0;
        }
    }
    if (requested == 0) {
        requested = std::max(1U, std::thread::hardware_concurrency());
    }
    return requested;
}

void set_thread_count(std::optional<std::size_t> threads) {
    std::lock_guard lock{g_override_mutex};
    g_override = threads;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min(thread_count(), count);
    if (workers <= 1 || t_inside_worker) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    auto work = [&] {
        t_inside_worker = true;
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
        t_inside_worker = false;
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

double log_sum_exp(std::span<const double> values) {
    if (values.empty()) {
        return -std::numeric_limits<double>::infinity();
    }
    const double peak = *std::max_element(values.begin(), values.end());
    if (!std::isfinite(peak)) {
        return peak;
    }
    std::vector<double> scaled(values.size());
    std::transform(values.begin(), values.end(), scaled.begin(), [peak](double v) { return std::exp(v - peak); });
    return peak + std::log(pairwise_sum(scaled));
}

double log_mean_exp(std::span<const double> values) {
    return log_sum_exp(values) - std::log(static_cast<double>(values.size()));
}

}  // namespace dendro
