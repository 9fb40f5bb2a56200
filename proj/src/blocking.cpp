#include "pcpd/blocking.hpp"

#include "pcpd/errors.hpp"

#include <string>

namespace pcpd {

std::size_t within_period_index(std::int64_t j, std::int64_t period) {
    if (j < 1 || period < 1) {
        throw InputError("within_period_index: j and M must be positive");
    }
    // Integer division floors for positive operands.
    return static_cast<std::size_t>(j + period - period * ((j + period - 1) / period));
}

std::string_view to_string(RemainderPolicy policy) {
    return policy == RemainderPolicy::drop ? "drop" : "recycle";
}

RemainderPolicy parse_remainder_policy(std::string_view name) {
    if (name == "drop") {
        return RemainderPolicy::drop;
    }
    if (name == "recycle") {
        return RemainderPolicy::recycle;
    }
    throw InputError("unknown remainder policy '" + std::string(name) + "'");
}

const Eigen::MatrixXd& BlockSeries::coordinate_distances(std::size_t m) const {
    if (m < 1 || m > coords_.size()) {
        throw InputError("coordinate out of range");
    }
    return coords_[m - 1];
}

BlockSeries BlockSeries::from_coordinate_distances(std::vector<Eigen::MatrixXd> distances,
                                                   std::size_t n_objects,
                                                   RemainderPolicy policy) {
    if (distances.empty()) {
        throw InputError("at least one coordinate distance matrix is required");
    }
    const auto k = distances.front().rows();
    if (k < 2) {
        throw InputError("series too short: need at least two blocks");
    }
    for (const auto& d : distances) {
        if (d.rows() != k || d.cols() != k) {
            throw InputError("coordinate distance matrices must all be K x K");
        }
        if (!is_symmetric(d) || d.minCoeff() < 0.0 || d.diagonal().cwiseAbs().maxCoeff() != 0.0) {
            throw InputError("coordinate distance matrices must be symmetric, nonnegative, hollow");
        }
    }
    BlockSeries b;
    b.n_ = n_objects;
    b.blocks_ = static_cast<std::size_t>(k);
    b.policy_ = policy;
    b.coords_ = std::move(distances);
    return b;
}

BlockSeries BlockSeries::slice(std::size_t first, std::size_t last) const {
    if (first > last || last >= blocks_) {
        throw InputError("block slice out of range");
    }
    const auto f = static_cast<Eigen::Index>(first);
    const auto len = static_cast<Eigen::Index>(last - first + 1);
    BlockSeries out;
    out.blocks_ = last - first + 1;
    out.n_ = out.blocks_ * period();
    out.policy_ = policy_;
    out.coords_.reserve(coords_.size());
    for (const auto& d : coords_) {
        out.coords_.push_back(d.block(f, f, len, len));
    }
    return out;
}

std::size_t block_source_index(std::size_t n, std::size_t period, RemainderPolicy policy,
                               std::size_t block, std::size_t m) {
    const std::size_t idx = block * period + (m - 1);
    if (policy == RemainderPolicy::recycle && idx >= n) {
        // Trailing partial block: copy the same within-period position from the
        // preceding block.
        return idx - period;
    }
    return idx;
}

BlockSeries blockify(const ObjectSeries& series, std::size_t period, RemainderPolicy policy) {
    if (period < 1) {
        throw InputError("period must be positive");
    }
    const std::size_t n = series.size();
    const std::size_t k = policy == RemainderPolicy::drop ? n / period : (n + period - 1) / period;
    if (k < 2 || (policy == RemainderPolicy::drop && n < 2 * period)) {
        throw InputError("series too short: " + std::to_string(n) + " objects with period " +
                         std::to_string(period) + " gives fewer than two blocks");
    }
    std::vector<Eigen::MatrixXd> coords(period, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k),
                                                                      static_cast<Eigen::Index>(k)));
    for (std::size_t m = 1; m <= period; ++m) {
        auto& d = coords[m - 1];
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t a = block_source_index(n, period, policy, i, m);
            for (std::size_t j = i + 1; j < k; ++j) {
                const std::size_t c = block_source_index(n, period, policy, j, m);
                const double v = series.distance(a, c);
                d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
                d(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
            }
        }
    }
    return BlockSeries::from_coordinate_distances(std::move(coords), n, policy);
}

} // namespace pcpd
