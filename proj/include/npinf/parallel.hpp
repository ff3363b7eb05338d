#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace npinf {

/// Runs fn(begin, end) over a partition of [0, total) on up to `jobs`
/// threads. Workers write to disjoint index ranges, so results are
/// independent of scheduling; callers reduce in index order to stay
/// deterministic.
template <typename Fn>
void parallel_chunks(std::uint64_t total, unsigned jobs, Fn&& fn) {
    if (jobs <= 1 || total <= 1) {
        fn(std::uint64_t{0}, total);
        return;
    }
    const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(jobs, total));
    std::vector<std::thread> threads;
    threads.reserve(workers);
    const std::uint64_t base = total / workers;
    const std::uint64_t extra = total % workers;
    std::uint64_t begin = 0;
    for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t end = begin + base + (w < extra ? 1 : 0);
        threads.emplace_back([&fn, begin, end] { fn(begin, end); });
        begin = end;
    }
    for (auto& t : threads) t.join();
}

}  // namespace npinf
