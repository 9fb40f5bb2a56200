#pragma once

#include "pcpd/blocking.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pcpd {

/// Bit-packed K x K x K ball-indicator tensor
///
///   T[i, j, k] = prod_{m in S} 1{ D(m)[i, k] <= D(m)[i, j] },
///
/// i.e. whether block k lies in the closed product ball centred at block i
/// whose radius in each coordinate is that coordinate's distance to block j.
/// Built once; every scan (observed, permuted, interval-restricted) reads it
/// through index relabelling and never touches distances again.
///
/// Storage is one row of ceil(K/64) words per (i, k) pair, indexed by j.
class DeltaTensor {
public:
    DeltaTensor() = default;

    // `coordinates` are 1-based and must be nonempty.
    static DeltaTensor build(const BlockSeries& blocks, std::span<const std::size_t> coordinates,
                             std::size_t threads = 0);
    static DeltaTensor build_joint(const BlockSeries& blocks, std::size_t threads = 0);

    std::size_t blocks() const noexcept { return k_; }
    std::size_t words_per_row() const noexcept { return words_; }
    const std::vector<std::size_t>& coordinates() const noexcept { return coords_; }
    std::size_t memory_bytes() const noexcept { return bits_.size() * sizeof(std::uint64_t); }

    bool operator()(std::size_t i, std::size_t j, std::size_t k) const noexcept {
        const std::uint64_t* row = slab(i, k);
        return ((row[j >> 6] >> (j & 63)) & 1U) != 0;
    }

    // Bits over j for fixed centre i and point k.
    const std::uint64_t* slab(std::size_t i, std::size_t k) const noexcept {
        return bits_.data() + (i * k_ + k) * words_;
    }

    // T'[i, j, k] = T[perm[i], perm[j], perm[k]].
    DeltaTensor relabel(std::span<const std::size_t> perm) const;

private:
    std::size_t k_ = 0;
    std::size_t words_ = 0;
    std::vector<std::size_t> coords_;
    std::vector<std::uint64_t> bits_;

    void set(std::size_t i, std::size_t j, std::size_t k) noexcept {
        bits_[(i * k_ + k) * words_ + (j >> 6)] |= std::uint64_t{1} << (j & 63);
    }
};

} // namespace pcpd
