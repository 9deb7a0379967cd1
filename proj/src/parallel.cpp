#include "femtet/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <thread>
#include <vector>

namespace femtet {

int thread_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("FEMTET_THREADS")) {
    int cap = 0;
    auto [p, ec] = std::from_chars(env, env + std::strlen(env), cap);
    if (ec == std::errc() && *p == '\0' && cap > 0) n = std::min(n, cap);
  }
  return n;
}

int parallel_chunks(
    std::size_t n,
    const std::function<void(int, std::size_t, std::size_t)>& body,
    std::size_t min_chunk) {
  if (n == 0) return 0;
  const std::size_t by_size = std::max<std::size_t>(1, n / std::max<std::size_t>(1, min_chunk));
  const int chunks = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(thread_count()), by_size));
  if (chunks == 1) {
    body(0, 0, n);
    return 1;
  }
  std::vector<std::exception_ptr> failures(chunks);
  std::vector<std::jthread> workers;
  workers.reserve(chunks);
  for (int c = 0; c < chunks; ++c) {
    const std::size_t begin = n * c / chunks;
    const std::size_t end = n * (c + 1) / chunks;
    workers.emplace_back([&, c, begin, end] {
      try {
        body(c, begin, end);
      } catch (...) {
        failures[c] = std::current_exception();
      }
    });
  }
  workers.clear();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return chunks;
}

}  // namespace femtet
