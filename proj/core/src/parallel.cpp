#include "carefree/parallel.hpp"

#include <cstdlib>
#include <string>

namespace carefree {

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv(kThreadsEnvVar); env != nullptr && *env != '\0') {
    try {
      const unsigned long parsed = std::stoul(env);
      if (parsed > 0) return static_cast<unsigned>(parsed);
    } catch (const std::exception&) {
      // fall through to hardware concurrency
    }
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

}  // namespace carefree
