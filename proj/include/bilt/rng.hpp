#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace bilt {

/// Counter-based Philox4x32-10 generator (Salmon et al., SC'11).
///
/// A stream is identified by a 64-bit key and a 64-bit stream id; the
/// remaining 64 counter bits index blocks inside the stream.  Two streams
/// with different (key, stream id) pairs never share a counter value, so
/// they cannot overlap.  Satisfies UniformRandomBitGenerator with 64-bit
/// output.
class PhiloxStream {
public:
    using result_type = std::uint64_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    PhiloxStream(std::uint64_t seed, std::uint64_t stream_id);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();

    /// Raw 10-round bijection; exposed for known-answer tests.
    static Block bijection(Block counter, Key key);

    std::uint64_t blocks_consumed() const { return block_index_; }

private:
    void refill();

    Key key_;
    std::uint64_t stream_id_;
    std::uint64_t block_index_ = 0;
    Block buffer_{};
    int cursor_ = 4;
};

/// Stream ids reserved for per-campaign draws; replication streams use
/// their replication index, which never reaches these values in practice.
inline constexpr std::uint64_t kCovarianceStream = std::numeric_limits<std::uint64_t>::max();
inline constexpr std::uint64_t kFixedSignalStream = std::numeric_limits<std::uint64_t>::max() - 1;

} // namespace bilt
