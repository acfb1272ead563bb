// parallel.hpp — Indexed parallel loop over independent trajectories

#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace rabi::detail {

// Runs fn(i) for i in [0, count).  Work items must be independent; results
// should be written to index i of a pre-sized container so the outcome does
// not depend on scheduling.  Returns (index, message) for every item that
// threw, in index order.
template <class Fn>
std::vector<std::pair<std::size_t, std::string>> parallel_for(std::size_t count,
                                                              unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::thread::hardware_concurrency();
  if (threads == 0) threads = 1;
  if (threads > count) threads = static_cast<unsigned>(count ? count : 1);

  std::vector<std::pair<std::size_t, std::string>> failures;
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (const std::exception& e) {
        failures.emplace_back(i, e.what());
      }
    }
    return failures;
  }

  std::vector<std::vector<std::pair<std::size_t, std::string>>> per_thread(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      for (std::size_t i = t; i < count; i += threads) {
        try {
          fn(i);
        } catch (const std::exception& e) {
          per_thread[t].emplace_back(i, e.what());
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& chunk : per_thread)
    failures.insert(failures.end(), chunk.begin(), chunk.end());
  std::sort(failures.begin(), failures.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return failures;
}

}  // namespace rabi::detail
