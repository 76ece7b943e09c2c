#pragma once

// Deterministic chunked sampling loop.  Samples are split into fixed-size
// chunks; every chunk derives its own RNG substream from (seed, chunk index)
// and produces a chunk-local report, and the reports are merged in chunk
// order.  Results are therefore identical for any worker count, including 1.

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

#include "proxlab/report.hpp"
#include "proxlab/rng.hpp"

namespace proxlab {

inline int worker_count() {
  if (const char* env = std::getenv("PROXLAB_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// body(chunk_rng, sample_index, report) evaluates one sample into the
// chunk-local report.  Sample i always sees the same substream regardless of
// chunking, because each sample re-derives its own rng.
inline check_report run_sampled_check(
    const check_report& prototype, std::int64_t count, std::uint64_t seed,
    const std::function<void(rng&, std::int64_t, check_report&)>& body) {
  constexpr std::int64_t chunk_size = 256;
  const std::int64_t n_chunks = count <= 0 ? 0 : (count + chunk_size - 1) / chunk_size;
  std::vector<check_report> partial(static_cast<std::size_t>(n_chunks), prototype);

  const int workers = std::min<std::int64_t>(worker_count(), std::max<std::int64_t>(n_chunks, 1));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_chunks));
  std::atomic<std::int64_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::int64_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      try {
        check_report& rep = partial[static_cast<std::size_t>(c)];
        const std::int64_t lo = c * chunk_size;
        const std::int64_t hi = std::min(count, lo + chunk_size);
        for (std::int64_t i = lo; i < hi; ++i) {
          rng g = rng::substream(seed, static_cast<std::uint64_t>(i));
          body(g, i, rep);
        }
      } catch (...) {
        errors[static_cast<std::size_t>(c)] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  check_report total = prototype;
  for (const auto& p : partial) total.merge(p);
  return total;
}

}  // namespace proxlab
