#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hsns {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

/// Thrown on invalid constructor arguments / preconditions.
struct invalid_argument_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw invalid_argument_error(msg);
}

/// Deterministic 64-bit RNG (splitmix64). Shared by all seeded generators so
/// that identical seeds give bit-identical streams on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0,1).
    double uniform() {
        return double(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [a,b).
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard normal via Box-Muller (no library distribution, so streams
    /// are identical across standard library implementations).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 1e-300) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * pi * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * pi * u2);
    }

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Worker cap for library-level loops.  0 means "hardware concurrency".
/// Reductions stay bit-reproducible regardless of the cap: every task writes
/// into its own pre-assigned slot and the combining pass runs in index order.
inline int& worker_cap() {
    static int cap = 1;
    return cap;
}

inline int effective_workers() {
    int cap = worker_cap();
    if (cap <= 0) {
        unsigned hc = std::thread::hardware_concurrency();
        cap = hc == 0 ? 1 : int(hc);
    }
    return cap;
}

/// Runs body(i) for i in [0,n).  Tasks are distributed in fixed contiguous
/// blocks; each body writes only to state indexed by i.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    int nw = effective_workers();
    if (nw <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::size_t nthreads = std::min<std::size_t>(nw, n);
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) {
        pool.emplace_back([&, t]() {
            for (std::size_t i = t; i < n; i += nthreads) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace hsns
