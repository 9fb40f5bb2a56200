#include "pcpd/delta_tensor.hpp"

#include "pcpd/errors.hpp"
#include "pcpd/parallel.hpp"

#include <numeric>

namespace pcpd {

DeltaTensor DeltaTensor::build(const BlockSeries& blocks, std::span<const std::size_t> coordinates,
                               std::size_t threads) {
    if (coordinates.empty()) {
        throw InputError("build_delta_tensor: coordinate set is empty");
    }
    for (const auto m : coordinates) {
        if (m < 1 || m > blocks.period()) {
            throw InputError("build_delta_tensor: coordinate out of range");
        }
    }
    DeltaTensor t;
    t.k_ = blocks.blocks();
    t.words_ = (t.k_ + 63) / 64;
    t.coords_.assign(coordinates.begin(), coordinates.end());
    t.bits_.assign(t.k_ * t.k_ * t.words_, 0);

    std::vector<const double*> cols;
    cols.reserve(coordinates.size());
    for (const auto m : coordinates) {
        cols.push_back(blocks.coordinate_distances(m).data());
    }
    const std::size_t k = t.k_;
    // Distinct centres write disjoint slabs.
    parallel_for(k, threads, [&](std::size_t, std::size_t i) {
        for (std::size_t pt = 0; pt < k; ++pt) {
            for (std::size_t r = 0; r < k; ++r) {
                bool inside = true;
                for (const double* d : cols) {
                    // Column i of a symmetric matrix is row i, contiguous in column-major.
                    if (!(d[i * k + pt] <= d[i * k + r])) {
                        inside = false;
                        break;
                    }
                }
                if (inside) {
                    t.set(i, r, pt);
                }
            }
        }
    });
    return t;
}

DeltaTensor DeltaTensor::build_joint(const BlockSeries& blocks, std::size_t threads) {
    std::vector<std::size_t> all(blocks.period());
    std::iota(all.begin(), all.end(), std::size_t{1});
    return build(blocks, all, threads);
}

DeltaTensor DeltaTensor::relabel(std::span<const std::size_t> perm) const {
    if (perm.size() != k_) {
        throw InputError("relabel: permutation size mismatch");
    }
    DeltaTensor out;
    out.k_ = k_;
    out.words_ = words_;
    out.coords_ = coords_;
    out.bits_.assign(bits_.size(), 0);
    for (std::size_t i = 0; i < k_; ++i) {
        for (std::size_t j = 0; j < k_; ++j) {
            for (std::size_t k = 0; k < k_; ++k) {
                if ((*this)(perm[i], perm[j], perm[k])) {
                    out.set(i, j, k);
                }
            }
        }
    }
    return out;
}

} // namespace pcpd
