#pragma once

#include "pcpd/blocking.hpp"
#include "pcpd/delta_tensor.hpp"
#include "pcpd/metric.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace pcpd {

/// Nonnegative bounded pair weights W(i, j) over block (or object) indices.
/// Default-constructed weights are identically 1.
class WeightSpec {
public:
    WeightSpec() = default;

    static WeightSpec unit() { return {}; }
    static WeightSpec from_matrix(Eigen::MatrixXd weights, double bound);
    static WeightSpec from_callback(std::size_t count, const std::function<double(std::size_t, std::size_t)>& fn,
                                    double bound);

    bool is_unit() const noexcept { return values_.size() == 0; }
    double bound() const noexcept { return bound_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    double operator()(std::size_t i, std::size_t j) const {
        return is_unit() ? 1.0 : values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

    // Weights restricted to the given indices, in that order.
    WeightSpec restricted(std::span<const std::size_t> indices) const;

private:
    Eigen::MatrixXd values_;
    double bound_ = 1.0;
};

// Mean of T[i, j, k] over k in [first, last] (0-based, inclusive); 0 if first > last.
double empirical_mdf(const DeltaTensor& tensor, std::size_t i, std::size_t j, std::ptrdiff_t first,
                     std::ptrdiff_t last);

struct CandidateRange {
    std::size_t first = 1;
    std::size_t last = 0;
    bool empty() const noexcept { return first > last; }
    std::size_t size() const noexcept { return empty() ? 0 : last - first + 1; }
};

// Integer splits t in max(1, ceil(bK)) .. min(K-1, floor((1-b)K)).
CandidateRange candidate_splits(std::size_t blocks, double b);

struct ScanPoint {
    std::size_t t = 0;
    double u = 0.0;
    double value = 0.0;
};

struct ScanMaximum {
    std::size_t t = 0; // smallest maximizing split
    double value = 0.0;
};

/// Blocked scan statistic B_n(t/K) over a (sub)sequence of blocks.
///
/// For split t the first segment is positions 0..t-1 and the second t..K-1.
/// With S[i, j] = sum_{k < t} T[i, j, k] and R[i, j] the full row count,
///   F1 - F2 = S/t - (R - S)/(K - t) = q / (t (K - t)),  q = S (K - t) - (R - S) t,
/// so each pair contributes an integer q^2 and, with unit weights, both
/// double sums are exact integers. Equal statistics therefore compare equal
/// bitwise regardless of the order the pairs were visited in.
///
/// Evaluation is O(K^3) per ordering via running prefix counts S.
class ScanStatistic {
public:
    struct Workspace {
        std::vector<std::uint32_t> prefix;
        std::vector<std::uint32_t> rows;
        std::vector<double> weights;
        std::vector<std::size_t> labels;
        std::vector<std::uint32_t> word;
        std::vector<std::uint32_t> shift;
    };

    // `blocks` selects and orders the tensor blocks forming the sequence; empty
    // means all blocks in natural order. Weights are indexed by tensor block.
    ScanStatistic(const DeltaTensor& tensor, WeightSpec weights, double b,
                  std::vector<std::size_t> blocks = {});

    std::size_t size() const noexcept { return blocks_.size(); }
    CandidateRange candidates() const noexcept { return range_; }
    const std::vector<std::size_t>& blocks() const noexcept { return blocks_; }

    // `order` permutes sequence positions (empty = identity).
    ScanMaximum maximize(std::span<const std::size_t> order, Workspace& ws) const;
    std::vector<ScanPoint> curve(std::span<const std::size_t> order, Workspace& ws) const;

private:
    const DeltaTensor* tensor_;
    WeightSpec weights_;
    std::vector<std::size_t> blocks_;
    CandidateRange range_;
    std::vector<std::uint32_t> row_counts_; // R over sequence positions

    template <class Sink>
    void run(std::span<const std::size_t> order, Workspace& ws, Sink&& sink) const;
};

std::vector<ScanPoint> scan_statistic_curve(const DeltaTensor& tensor, const WeightSpec& weights, double b);

void write_scan_curve_csv(std::ostream& out, std::span<const ScanPoint> curve);

/// Two-sample metric-distribution-function statistic on a pooled sample
///
///   sum_{s=1,2} n_s^-2 sum_{i, j in sample s} W(i, j) (F1(i, j) - F2(i, j))^2,
///
/// where F_s(i, j) is the share of sample s inside the closed ball centred at
/// i through j. Sorting each centre's distances once makes every relabelled
/// evaluation O(N^2).
class TwoSampleMdf {
public:
    struct Workspace {
        std::vector<std::uint32_t> prefix;
    };

    explicit TwoSampleMdf(const Eigen::MatrixXd& distances, WeightSpec weights = {});

    std::size_t size() const noexcept { return n_; }

    // in_first[i] != 0 puts pooled object i in the first sample.
    double evaluate(std::span<const std::uint8_t> in_first, Workspace& ws) const;
    double evaluate(std::span<const std::uint8_t> in_first) const {
        Workspace ws;
        return evaluate(in_first, ws);
    }

private:
    std::size_t n_ = 0;
    WeightSpec weights_;
    std::vector<std::uint32_t> sorted_;   // per centre: objects by increasing distance
    std::vector<std::uint32_t> in_ball_;  // per (centre, radius point): #objects in the closed ball
};

// Empirical MCVM between two object samples sharing a metric.
double mcvm_two_sample(const ObjectSeries& first, const ObjectSeries& second, const WeightSpec& weights = {});

// Marginal statistic for coordinate m (1-based) at split t_hat: blocks
// 1..t_hat against t_hat+2..K, the change block t_hat+1 left out.
double marginal_statistic(const BlockSeries& blocks, std::size_t m, std::size_t t_hat,
                          const WeightSpec& weights = {});

// Blocks retained by the marginal test: every block except the change block.
std::vector<std::size_t> retained_blocks(std::size_t blocks, std::size_t t_hat);

} // namespace pcpd
