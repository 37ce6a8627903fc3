#include "bohm/parallel.hpp"

#include <cstdlib>
#include <string>

namespace bohm {

unsigned default_thread_count() {
  if (char const* env = std::getenv("BOHMSIM_THREADS")) {
    try {
      int const n = std::stoi(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (...) {
    }
  }
  unsigned const hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

}  // namespace bohm
