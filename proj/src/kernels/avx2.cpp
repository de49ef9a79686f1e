// Compiled with -mavx2; only reached through the dispatcher after a CPU check.

#include <immintrin.h>

#include <cstring>

#include "ztree/kernels.hpp"

namespace ztree::kernels::avx2 {

namespace {

// Byte expansion of a 4-bit compare result: bit k -> byte k in {0,1}.
constexpr std::uint32_t kNibbleToBytes[16] = {
    0x00000000, 0x00000001, 0x00000100, 0x00000101, 0x00010000, 0x00010001, 0x00010100, 0x00010101,
    0x01000000, 0x01000001, 0x01000100, 0x01000101, 0x01010000, 0x01010001, 0x01010100, 0x01010101,
};

template <int Predicate>
inline void compare(std::span<const double> x, double value, Mask out) {
  const std::size_t n = x.size();
  const __m256d v = _mm256_set1_pd(value);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d lanes = _mm256_loadu_pd(x.data() + i);
    const int bits = _mm256_movemask_pd(_mm256_cmp_pd(lanes, v, Predicate));
    std::memcpy(out.data() + i, &kNibbleToBytes[bits], 4);
  }
  for (; i < n; ++i) {
    if constexpr (Predicate == _CMP_GT_OQ) {
      out[i] = x[i] > value ? 1 : 0;
    } else {
      out[i] = x[i] == value ? 1 : 0;
    }
  }
}

// Four mask bytes as 0.0/1.0 doubles.
inline __m256d load_mask4(const std::uint8_t* p) {
  std::int32_t word;
  std::memcpy(&word, p, 4);
  return _mm256_cvtepi32_pd(_mm_cvtepu8_epi32(_mm_cvtsi32_si128(word)));
}

inline double lane_sum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

}  // namespace

void greater_than(std::span<const double> x, double cutoff, Mask out) { compare<_CMP_GT_OQ>(x, cutoff, out); }

void equal_to(std::span<const double> x, double value, Mask out) { compare<_CMP_EQ_OQ>(x, value, out); }

void and_masks(ConstMask a, ConstMask b, Mask out) {
  const std::size_t n = a.size();
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a.data() + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b.data() + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out.data() + i), _mm256_and_si256(va, vb));
  }
  for (; i < n; ++i) out[i] = a[i] & b[i];
}

std::size_t count(ConstMask mask) {
  const std::size_t n = mask.size();
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(mask.data() + i));
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(v, _mm256_setzero_si256()));
  }
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  std::size_t total = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) total += mask[i];
  return total;
}

SplitMoments split_moments(ConstMask mask, std::span<const double> y) {
  const std::size_t n = y.size();
  __m256d cnt = _mm256_setzero_pd();
  __m256d sum_in = _mm256_setzero_pd(), sq_in = _mm256_setzero_pd();
  __m256d sum_out = _mm256_setzero_pd(), sq_out = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d m = load_mask4(mask.data() + i);
    const __m256d v = _mm256_loadu_pd(y.data() + i);
    const __m256d vin = _mm256_mul_pd(v, m);
    const __m256d vout = _mm256_sub_pd(v, vin);  // exact: vin is v or 0
    cnt = _mm256_add_pd(cnt, m);
    sum_in = _mm256_add_pd(sum_in, vin);
    sq_in = _mm256_add_pd(sq_in, _mm256_mul_pd(vin, vin));
    sum_out = _mm256_add_pd(sum_out, vout);
    sq_out = _mm256_add_pd(sq_out, _mm256_mul_pd(vout, vout));
  }
  SplitMoments r;
  r.in = {lane_sum(cnt), lane_sum(sum_in), lane_sum(sq_in)};
  r.out = {static_cast<double>(i) - r.in.count, lane_sum(sum_out), lane_sum(sq_out)};
  for (; i < n; ++i) {
    Moments& m = mask[i] ? r.in : r.out;
    m.count += 1.0;
    m.sum += y[i];
    m.sum_sq += y[i] * y[i];
  }
  return r;
}

SplitMoments4 split_moments4(ConstMask mask, ConstMask arm, std::span<const double> y) {
  const std::size_t n = y.size();
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d cnt[2][2], sum[2][2], sq[2][2];
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      cnt[a][b] = sum[a][b] = sq[a][b] = _mm256_setzero_pd();
    }
  }
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d m1 = load_mask4(mask.data() + i);
    const __m256d t1 = load_mask4(arm.data() + i);
    const __m256d m0 = _mm256_sub_pd(one, m1);
    const __m256d t0 = _mm256_sub_pd(one, t1);
    const __m256d v = _mm256_loadu_pd(y.data() + i);
    const __m256d w[2][2] = {{_mm256_mul_pd(m0, t0), _mm256_mul_pd(m0, t1)},
                             {_mm256_mul_pd(m1, t0), _mm256_mul_pd(m1, t1)}};
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        const __m256d vw = _mm256_mul_pd(v, w[a][b]);
        cnt[a][b] = _mm256_add_pd(cnt[a][b], w[a][b]);
        sum[a][b] = _mm256_add_pd(sum[a][b], vw);
        sq[a][b] = _mm256_add_pd(sq[a][b], _mm256_mul_pd(vw, vw));
      }
    }
  }
  SplitMoments4 r;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      r.cell[a][b] = {lane_sum(cnt[a][b]), lane_sum(sum[a][b]), lane_sum(sq[a][b])};
    }
  }
  for (; i < n; ++i) {
    Moments& m = r.cell[mask[i]][arm[i]];
    m.count += 1.0;
    m.sum += y[i];
    m.sum_sq += y[i] * y[i];
  }
  return r;
}

}  // namespace ztree::kernels::avx2
