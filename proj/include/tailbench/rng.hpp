#pragma once

#include <cstdint>
#include <random>

namespace tailbench {

// 64-bit Mersenne Twister with an explicit seed. Uniforms are built from the
// top 53 bits so the stream is identical on every platform (unlike
// std::uniform_real_distribution, whose algorithm is implementation-defined).
class Rng
{
public:
  explicit Rng(std::uint64_t seed)
    : engine_(seed)
  {
  }

  // Uniform on the open interval (0, 1).
  double uniform_open()
  {
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1p-53;
  }

private:
  std::mt19937_64 engine_;
};

} // namespace tailbench
