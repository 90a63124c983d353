#pragma once

// Reproducible random numbers for instance generation.
//
// Draws come from the Philox4x32-10 counter-based generator. The 64-bit seed
// is the key; the 128-bit counter is (block_lo, block_hi, stream, domain), so
// every (domain, stream) pair is an independent sequence that does not depend
// on how many numbers other sequences consumed. Each block yields two 64-bit
// words. Uniforms use the top 53 bits, (u + 0.5) * 2^-53, which lies strictly
// inside (0, 1); normals are the inverse normal CDF of a uniform.

#include <array>
#include <cstdint>

namespace opscale {

struct Seed {
  std::uint64_t value = 0;
};

/// Domains keep the streams of different generators apart.
enum class RngDomain : std::uint32_t {
  kHilbertFactors = 1,  // stream i -> Q_i of the Hilbert family
  kFrameLeft = 2,       // k x k orthogonal Q of the frame family
  kFrameRight = 3,      // n x n orthogonal P of the frame family
  kConditioned = 4,     // conditioned_instance, streams 2i (U_i) and 2i+1 (V_i)
  kGeneric = 5,         // haar_orthogonal(dim, seed)
};

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Ten rounds of Philox4x32 (Salmon et al. 2011 constants).
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

class CounterRng {
 public:
  CounterRng(Seed seed, RngDomain domain, std::uint32_t stream);

  std::uint64_t next_u64();
  double uniform();
  double normal();

 private:
  PhiloxKey key_;
  std::uint32_t domain_;
  std::uint32_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

}  // namespace opscale
