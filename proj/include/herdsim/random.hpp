#pragma once

#include <array>
#include <cstdint>

namespace herdsim {

/// Raw Philox4x64-10 block function: four 64-bit words of output per
/// (key, counter) pair. Stateless; the whole stream abstraction below is
/// built on top of it.
std::array<std::uint64_t, 4> philox4x64(std::uint64_t key0, std::uint64_t key1,
                                        std::uint64_t ctr0, std::uint64_t ctr1 = 0,
                                        std::uint64_t ctr2 = 0, std::uint64_t ctr3 = 0);

/// Inverse standard-normal CDF (Wichura's AS 241, double-precision branch).
/// Requires u in (0, 1).
double normal_icdf(double u);

/// Deterministic, seekable random stream.
///
/// A stream is identified by (seed, substream_id); both map directly onto the
/// Philox key, so streams with equal identity produce identical draw
/// sequences and streams with different identities are independent counter
/// spaces of the same generator.
///
/// Draw positions ("ticks") are explicit: tick t consumes word (t mod 4) of
/// the Philox block at counter (t / 4). Sequential calls advance the tick by
/// one; the *_at accessors read any tick without touching stream state and
/// are safe to call concurrently. This is what allows a parallel loop to
/// produce bit-identical draws to a sequential one: assign each consumer its
/// tick range up front, then advance the stream past the block.
///
/// A stream is single-owner; mutating calls must not race. Within one model
/// timestep the draw order is fixed and documented in model.hpp.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t substream_id = 0)
        : seed_(seed), substream_(substream_id) {}

    /// Standard-normal variate; advances the stream by one tick.
    double gaussian();

    /// Uniform variate on [a, b]; advances by one tick. Throws on a > b.
    double uniform(double a, double b);

    /// Next raw 64-bit word; advances by one tick.
    std::uint64_t raw();

    // Random access. Pure reads of the (seed, substream) counter space;
    // do not advance the stream and never race.
    std::uint64_t raw_at(std::uint64_t tick) const;
    double gaussian_at(std::uint64_t tick) const;
    double uniform_at(std::uint64_t tick, double a, double b) const;

    std::uint64_t tick() const { return tick_; }
    void seek(std::uint64_t tick) { tick_ = tick; }
    void skip(std::uint64_t n) { tick_ += n; }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t substream() const { return substream_; }

    /// Map a raw word to a double in the open interval (0, 1).
    static double to_unit_open(std::uint64_t word) {
        return (static_cast<double>(word >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    std::uint64_t seed_;
    std::uint64_t substream_;
    std::uint64_t tick_ = 0;
    // One-block cache for the sequential path.
    std::uint64_t cached_block_ = ~std::uint64_t{0};
    std::array<std::uint64_t, 4> block_{};
};

/// Thread-local caching reader over a stream's counter space. Each worker in
/// a parallel loop owns one; consecutive ticks hit the cached block, so the
/// amortized cost matches the sequential path.
class BlockReader {
public:
    explicit BlockReader(const RandomStream& stream)
        : seed_(stream.seed()), substream_(stream.substream()) {}

    std::uint64_t raw_at(std::uint64_t tick) {
        const std::uint64_t block = tick >> 2;
        if (block != cached_block_) {
            words_ = philox4x64(seed_, substream_, block);
            cached_block_ = block;
        }
        return words_[tick & 3];
    }

    double gaussian_at(std::uint64_t tick) {
        return normal_icdf(RandomStream::to_unit_open(raw_at(tick)));
    }

private:
    std::uint64_t seed_;
    std::uint64_t substream_;
    std::uint64_t cached_block_ = ~std::uint64_t{0};
    std::array<std::uint64_t, 4> words_{};
};

}  // namespace herdsim
