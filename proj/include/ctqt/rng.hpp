#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace ctqt {

// Seedable stream of random draws. Every stochastic call in a protocol run
// pulls from one stream in schedule order, so transcripts replay bit-for-bit
// from the seed. Per-trial streams are split off a master seed with derive().
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : gen_(seed) {}

    // uniform in [0, 1), 53 bits
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    std::int64_t uniform_int(std::int64_t n);  // uniform in [0, n)

    double gaussian();  // standard normal, Box-Muller (two draws per call pair)

    // inverse-CDF sample from a probability vector (clamped to the last bin)
    int sample(std::span<const double> probs);

    // splitmix64-style mix; independent stream seeds from a master seed
    static std::uint64_t derive(std::uint64_t master, std::uint64_t stream);

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ctqt
