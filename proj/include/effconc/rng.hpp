#pragma once

#include <cstdint>

namespace effconc {

// splitmix64 finaliser.
std::uint64_t mix64(std::uint64_t z);

// Counter-based generator: draw i of stream s under seed k is
// mix64(key(k, s) + (i + 1) * golden). Streams with distinct ids are
// independent for practical purposes, and any draw can be recomputed from
// (seed, stream, counter) alone.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();
    // 53 random bits mapped to [0, 1).
    double uniform();
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Derives a stream id from up to three labels (e.g. rule, ell, replication).
std::uint64_t stream_id(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

}  // namespace effconc
