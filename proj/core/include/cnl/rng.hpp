#pragma once

#include <array>
#include <cstdint>

namespace cnl {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Independent random stream addressed by (seed, stream id).
///
/// Draws are a pure function of (seed, stream, draw index), so trajectory i of
/// an ensemble sees the same numbers no matter which worker runs it. Not
/// thread-safe; each worker owns its streams.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();
    /// Uniform on (0, 1], 53-bit resolution.
    double uniform();
    /// Standard normal (Box-Muller).
    double normal();
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// Stream-id domains so that trajectory, bootstrap and auxiliary draws never overlap.
namespace stream_domain {
inline constexpr std::uint64_t trajectory = 0;
inline constexpr std::uint64_t bootstrap = 1ULL << 62;
inline constexpr std::uint64_t auxiliary = 1ULL << 63;
}  // namespace stream_domain

}  // namespace cnl
