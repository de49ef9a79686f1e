#include <atomic>
#include <cstdlib>
#include <string>

#include "ztree/kernels.hpp"

namespace ztree::kernels {

std::string_view to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::scalar,   scalar::greater_than,   scalar::equal_to,      scalar::and_masks,
                                 scalar::count, scalar::split_moments, scalar::split_moments4};
  return table;
}

const KernelTable* avx2_table() {
#if defined(ZTREE_HAVE_AVX2)
  static const KernelTable table{Isa::avx2,   avx2::greater_than,   avx2::equal_to,      avx2::and_masks,
                                 avx2::count, avx2::split_moments, avx2::split_moments4};
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &table : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* initial_table() {
  const char* env = std::getenv("ZTREE_SIMD");
  const std::string choice = env ? env : "auto";
  if (choice == "scalar") return &scalar_table();
  if (const auto* t = avx2_table()) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

bool select(Isa isa) {
  const KernelTable* table = isa == Isa::avx2 ? avx2_table() : &scalar_table();
  if (!table) return false;
  current().store(table, std::memory_order_release);
  return true;
}

}  // namespace ztree::kernels
