#include "assistfair/parallel.hpp"

#include <cstdlib>
#include <string>

namespace assistfair {

unsigned default_thread_count() {
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ASSISTFAIR_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap > 0) threads = static_cast<unsigned>(cap);
    } catch (const std::exception&) {
      // unparsable values are ignored
    }
  }
  return threads;
}

}  // namespace assistfair
