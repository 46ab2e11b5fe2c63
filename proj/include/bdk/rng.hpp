#pragma once

#include <array>
#include <cstdint>

namespace bdk {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based stream keyed by the seed; the high counter words hold the
/// stream id (replicate index), the low words count draws. Streams with
/// different ids never overlap, so results cannot depend on scheduling.
class RandomStream {
  public:
    RandomStream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();
    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();
    /// Exponential with the given rate.
    double exponential(double rate);

  private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int used_ = 4;
};

} // namespace bdk
