#pragma once

// Thin RAII layer over FFTW.  Plans are created once per (size, direction),
// in place and alignment-agnostic, so execution on any buffer is thread-safe.

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

namespace feqo::fft {

enum class Direction { Forward, Backward };

namespace detail {

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const noexcept { fftw_destroy_plan(p); }
};
using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

inline fftw_plan plan_for(std::size_t n, Direction dir) {
    static std::map<std::pair<std::size_t, int>, PlanHandle> cache;
    const int sign = dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
    std::lock_guard lock(planner_mutex());
    auto key = std::make_pair(n, sign);
    if (auto it = cache.find(key); it != cache.end()) return it->second.get();
    std::vector<std::complex<double>> scratch(n);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    auto [it, inserted] = cache.emplace(key, PlanHandle(p));
    return it->second.get();
}

}  // namespace detail

/// Unnormalised in-place DFT: X_m = sum_n x_n exp(-+2 pi i m n / N).
inline void transform(std::span<std::complex<double>> data, Direction dir) {
    if (data.empty()) return;
    fftw_plan p = detail::plan_for(data.size(), dir);
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(p, buf, buf);
}

}  // namespace feqo::fft
