#pragma once

#include <cstdint>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gtsens {

/// Chunk width for the deterministic reduction tree. Replicates are reduced
/// into per-chunk accumulators in replicate order, and the chunks are folded
/// left to right, so the result is bit-identical for any thread count.
inline constexpr std::uint64_t kReplicateChunk = 4096;

/// Serial reference: same chunking and fold order as the parallel kernel.
template <class Acc, class Body>
Acc replicate_reduce_serial(std::uint64_t n, Body&& body) {
    std::uint64_t n_chunks = (n + kReplicateChunk - 1) / kReplicateChunk;
    std::vector<Acc> partial(n_chunks);
    for (std::uint64_t c = 0; c < n_chunks; ++c) {
        std::uint64_t lo = c * kReplicateChunk;
        std::uint64_t hi = lo + kReplicateChunk < n ? lo + kReplicateChunk : n;
        Acc& acc = partial[c];
        for (std::uint64_t r = lo; r < hi; ++r) body(acc, r);
    }
    Acc total;
    for (auto& p : partial) total.merge(p);
    return total;
}

/// OpenMP kernel. `threads == 0` means the runtime default; `threads == 1`
/// runs the serial reference path. Acc needs a default constructor and
/// merge(const Acc&); Body is body(Acc&, replicate_index) and must be pure
/// given the replicate index (all randomness through counter-based streams).
template <class Acc, class Body>
Acc replicate_reduce(std::uint64_t n, unsigned threads, Body&& body) {
    if (n == 0) return Acc{};
#ifdef _OPENMP
    if (threads == 1) return replicate_reduce_serial<Acc>(n, body);
    std::uint64_t n_chunks = (n + kReplicateChunk - 1) / kReplicateChunk;
    std::vector<Acc> partial(n_chunks);
    // exceptions must not unwind out of the parallel region; capture the
    // first one per chunk and rethrow after the join
    std::vector<std::exception_ptr> errors(n_chunks);
    std::int64_t nc = static_cast<std::int64_t>(n_chunks);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads ? static_cast<int>(threads) : omp_get_max_threads())
    for (std::int64_t c = 0; c < nc; ++c) {
        std::uint64_t lo = static_cast<std::uint64_t>(c) * kReplicateChunk;
        std::uint64_t hi = lo + kReplicateChunk < n ? lo + kReplicateChunk : n;
        Acc& acc = partial[static_cast<std::size_t>(c)];
        try {
            for (std::uint64_t r = lo; r < hi; ++r) body(acc, r);
        } catch (...) {
            errors[static_cast<std::size_t>(c)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    Acc total;
    for (auto& p : partial) total.merge(p);
    return total;
#else
    (void)threads;
    return replicate_reduce_serial<Acc>(n, body);
#endif
}

}  // namespace gtsens
