#pragma once

#include <cstdint>

namespace testsupport {

// Small deterministic generator for fuzz-style tests. Seeds are fixed in the
// tests so failures reproduce exactly; std::mt19937 would work too but its
// state dumps are noisy in assertion messages.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next() {
        state_ ^= state_ << 13;
        state_ ^= state_ >> 7;
        state_ ^= state_ << 17;
        return state_;
    }

    // uniform in [0, bound)
    std::uint64_t below(std::uint64_t bound) { return bound ? next() % bound : 0; }

    int range(int lo, int hi) { // inclusive ends
        return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    bool chance(int percent) { return range(1, 100) <= percent; }

private:
    std::uint64_t state_;
};

} // namespace testsupport
