#include <algorithm>
#include <atomic>
#include <thread>

#include "radproj/error.hpp"
#include "radproj/parallel.hpp"
#include "radproj/summation.hpp"

namespace radproj {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_input: return "invalid_input";
        case ErrorCode::support_overlap: return "support_overlap";
        case ErrorCode::grid_too_small: return "grid_too_small";
        case ErrorCode::constraint: return "constraint";
        case ErrorCode::io: return "io";
    }
    return "unknown";
}

namespace {

std::atomic<unsigned> g_thread_cap{0};

double pairwise_sum_impl(const double* v, std::size_t n) {
    if (n <= 16) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += v[i];
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum_impl(v, half) + pairwise_sum_impl(v + half, n - half);
}

}  // namespace

void set_thread_count(unsigned n) { g_thread_cap.store(n); }

unsigned thread_count() {
    const unsigned cap = g_thread_cap.load();
    if (cap != 0) return cap;
    return std::max(1u, std::thread::hardware_concurrency());
}

double pairwise_sum(std::span<const double> values) { return pairwise_sum_impl(values.data(), values.size()); }

}  // namespace radproj
