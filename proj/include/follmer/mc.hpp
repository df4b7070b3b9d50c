#pragma once
// Deterministic parallel Monte Carlo reduction.
//
// Paths are partitioned into fixed-size chunks by path index.  Workers claim
// chunks through an atomic counter and write per-chunk partial sums into a
// preallocated slot table; the final merge then runs sequentially in chunk
// order.  Because every path owns its own random stream (keyed by path
// index) and the merge order is fixed, the result is bit-identical for any
// worker count, including one.

#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

namespace follmer {

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;  // ("stderr" is claimed by <cstdio>)
    std::size_t n_paths = 0;
};

struct McAccumulator {
    double sum = 0.0;
    double sum_squares = 0.0;
    std::size_t count = 0;

    void add(double value) {
        sum += value;
        sum_squares += value * value;
        ++count;
    }
    void merge(const McAccumulator& other) {
        sum += other.sum;
        sum_squares += other.sum_squares;
        count += other.count;
    }
    McEstimate estimate() const {
        McEstimate out;
        out.n_paths = count;
        if (count == 0) return out;
        out.mean = sum / static_cast<double>(count);
        if (count > 1) {
            const double n = static_cast<double>(count);
            const double variance =
                std::max(0.0, (sum_squares - sum * sum / n) / (n - 1.0));
            out.std_error = std::sqrt(variance / n);
        }
        return out;
    }
};

inline constexpr std::size_t kMcChunkSize = 1024;

// Worker-count resolution: explicit request > 0 wins; otherwise the
// FOLLMER_LAB_WORKERS environment variable; otherwise hardware concurrency.
std::size_t resolve_worker_count(std::size_t requested);

// Runs `evaluate(path_index, scratch, out)` for path_index = 0 .. n_paths-1,
// where `out` receives n_stats sample values, and reduces each statistic to
// an McEstimate.  `make_scratch` is invoked once per worker.
template <class Scratch>
std::vector<McEstimate> run_monte_carlo_multi(
    std::size_t n_paths, std::size_t n_stats, std::size_t workers,
    const std::function<Scratch()>& make_scratch,
    const std::function<void(std::size_t, Scratch&, std::span<double>)>& evaluate) {
    if (n_paths == 0 || n_stats == 0) {
        throw std::invalid_argument("run_monte_carlo_multi: n_paths and n_stats must be positive");
    }
    const std::size_t n_chunks = (n_paths + kMcChunkSize - 1) / kMcChunkSize;
    std::vector<McAccumulator> slots(n_chunks * n_stats);

    std::atomic<std::size_t> next_chunk{0};
    const std::size_t n_workers = std::max<std::size_t>(1, std::min(resolve_worker_count(workers), n_chunks));

    auto work = [&](std::exception_ptr& failure) {
        try {
            Scratch scratch = make_scratch();
            std::vector<double> values(n_stats);
            for (;;) {
                const std::size_t chunk = next_chunk.fetch_add(1, std::memory_order_relaxed);
                if (chunk >= n_chunks) break;
                const std::size_t begin = chunk * kMcChunkSize;
                const std::size_t end = std::min(begin + kMcChunkSize, n_paths);
                McAccumulator* chunk_slots = slots.data() + chunk * n_stats;
                for (std::size_t path = begin; path < end; ++path) {
                    evaluate(path, scratch, values);
                    for (std::size_t j = 0; j < n_stats; ++j) chunk_slots[j].add(values[j]);
                }
            }
        } catch (...) {
            failure = std::current_exception();
        }
    };

    std::vector<std::exception_ptr> failures(n_workers);
    if (n_workers == 1) {
        work(failures[0]);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w) {
            pool.emplace_back([&work, &failures, w] { work(failures[w]); });
        }
        for (auto& thread : pool) thread.join();
    }
    for (const auto& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }

    // Sequential merge in chunk order: the reduction order never depends on
    // scheduling, so the estimates are bit-identical across worker counts.
    std::vector<McEstimate> out(n_stats);
    for (std::size_t j = 0; j < n_stats; ++j) {
        McAccumulator total;
        for (std::size_t chunk = 0; chunk < n_chunks; ++chunk) {
            total.merge(slots[chunk * n_stats + j]);
        }
        out[j] = total.estimate();
    }
    return out;
}

template <class Scratch>
McEstimate run_monte_carlo(std::size_t n_paths, std::size_t workers,
                           const std::function<Scratch()>& make_scratch,
                           const std::function<double(std::size_t, Scratch&)>& evaluate) {
    auto estimates = run_monte_carlo_multi<Scratch>(
        n_paths, 1, workers, make_scratch,
        [&evaluate](std::size_t path, Scratch& scratch, std::span<double> out) {
            out[0] = evaluate(path, scratch);
        });
    return estimates[0];
}

} // namespace follmer
