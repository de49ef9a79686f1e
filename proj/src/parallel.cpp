#include "ztree/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <string_view>

namespace ztree {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ZTREE_THREADS")) {
    const std::string_view text(env);
    int value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc() && end == text.data() + text.size() && value > 0) return value;
  }
  return 1;
}

}  // namespace ztree
