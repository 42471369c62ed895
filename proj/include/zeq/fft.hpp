#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <utility>

#include <fftw3.h>

namespace zeq::detail {

// Plans are created once per (size, direction) and reused through the
// new-array execute interface, which FFTW documents as thread-safe.
// Only plan creation touches the planner, so it is serialized here.
class FftPlanCache {
public:
    static FftPlanCache& instance()
    {
        static FftPlanCache cache;
        return cache;
    }

    fftw_plan get(std::size_t n, int sign)
    {
        std::lock_guard lock(mutex_);
        const auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end())
            return it->second;
        auto* in = fftw_alloc_complex(n);
        auto* out = fftw_alloc_complex(n);
        fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(in);
        fftw_free(out);
        plans_.emplace(key, p);
        return p;
    }

    FftPlanCache(const FftPlanCache&) = delete;
    FftPlanCache& operator=(const FftPlanCache&) = delete;

    ~FftPlanCache()
    {
        for (auto& [key, p] : plans_)
            fftw_destroy_plan(p);
    }

private:
    FftPlanCache() = default;

    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

/// Unnormalized DFT: out_k = sum_n in_n e^{sign * 2 pi i n k / N}.
inline void dft(std::span<const std::complex<double>> in, std::span<std::complex<double>> out, int sign)
{
    const std::size_t n = in.size();
    fftw_plan p = FftPlanCache::instance().get(n, sign);
    // fftw_execute_dft never writes to its input for out-of-place c2c plans.
    auto* src = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data()));
    auto* dst = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(p, src, dst);
}

} // namespace zeq::detail
