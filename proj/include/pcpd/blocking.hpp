#pragma once

#include "pcpd/metric.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace pcpd {

// r(j): position of observation j (1-based) inside its period, in 1..M.
std::size_t within_period_index(std::int64_t j, std::int64_t period);

enum class RemainderPolicy { drop, recycle };

std::string_view to_string(RemainderPolicy policy);
RemainderPolicy parse_remainder_policy(std::string_view name);

/// K periodic blocks of length M plus one K x K distance matrix per
/// within-period coordinate: D(m)[i, j] = d(Z_{i,m}, Z_{j,m}).
///
/// Block indices are 0-based here; coordinates are 1-based (1..M) to line up
/// with the within-block index reported by the localizer.
class BlockSeries {
public:
    BlockSeries() = default;

    // Wraps precomputed per-coordinate matrices (symmetric, nonnegative, hollow).
    static BlockSeries from_coordinate_distances(std::vector<Eigen::MatrixXd> distances,
                                                 std::size_t n_objects,
                                                 RemainderPolicy policy = RemainderPolicy::drop);

    std::size_t objects() const noexcept { return n_; }
    std::size_t period() const noexcept { return coords_.size(); }
    std::size_t blocks() const noexcept { return blocks_; }
    RemainderPolicy policy() const noexcept { return policy_; }

    const Eigen::MatrixXd& coordinate_distances(std::size_t m) const;
    double distance(std::size_t m, std::size_t i, std::size_t j) const {
        return coords_[m - 1](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

    // Blocks [first, last] (0-based, inclusive) as a standalone series.
    BlockSeries slice(std::size_t first, std::size_t last) const;

private:
    std::size_t n_ = 0;
    std::size_t blocks_ = 0;
    RemainderPolicy policy_ = RemainderPolicy::drop;
    std::vector<Eigen::MatrixXd> coords_;
};

// Object index (0-based) placed at block i, coordinate m (1-based) by blockify.
std::size_t block_source_index(std::size_t n, std::size_t period, RemainderPolicy policy,
                               std::size_t block, std::size_t m);

BlockSeries blockify(const ObjectSeries& series, std::size_t period,
                     RemainderPolicy policy = RemainderPolicy::drop);

} // namespace pcpd
