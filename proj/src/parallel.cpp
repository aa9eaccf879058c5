#include "gnlab/parallel.hpp"

namespace gnlab {

namespace {

std::atomic<unsigned> g_max_threads{0};

}  // namespace

void set_max_threads(unsigned count) { g_max_threads = count; }

unsigned max_threads() {
  const unsigned cap = g_max_threads;
  if (cap != 0) return cap;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace gnlab
