#pragma once

#include "pcpd/blocking.hpp"
#include "pcpd/detector.hpp"
#include "pcpd/localizer.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace pcpd {

// Block interval [lo, hi], 1-based and inclusive.
struct SeededInterval {
    std::size_t lo = 0;
    std::size_t hi = 0;
    std::size_t layer = 0;

    std::size_t length() const noexcept { return hi - lo + 1; }
    friend bool operator==(const SeededInterval&, const SeededInterval&) = default;
};

// Deterministic seeded interval collection. Layer l holds intervals of length
// ceil(K a^l) with 2 ceil(K / len) - 1 evenly spaced starts, so neighbours
// overlap by at least half; layers stop below min_len.
std::vector<SeededInterval> seeded_intervals(std::size_t blocks, double decay, std::size_t min_len);

struct SegmentationConfig {
    double decay = 0.70710678118654752; // 1/sqrt(2)
    std::optional<std::size_t> min_interval_len; // default max(10, ceil(2/b))
    std::optional<std::size_t> min_gap;          // default ceil(min_interval_len / 2)
    std::optional<double> alpha_seg;             // default alpha / #intervals
    std::optional<std::size_t> max_perms;        // default max(L, ceil(2 / alpha_seg))
    bool localize = true;
};

// SegmentationConfig with every default filled in for a given K.
struct ResolvedSegmentation {
    double decay = 0.0;
    std::size_t min_interval_len = 0;
    std::size_t min_gap = 0;
    double alpha_seg = 0.0;
    std::size_t max_perms = 0;
    std::size_t intervals = 0;
};

ResolvedSegmentation resolve(const SegmentationConfig& seg, const DetectorConfig& cfg, std::size_t blocks);

struct ChangePoint {
    std::size_t t_hat = 0; // global block count before the split
    std::size_t l_F_hat = 0;
    double tau_F_hat = 0.0;
    double p_value = 1.0;
    SeededInterval interval;
    std::optional<LocalizationResult> localization;
};

struct SegmentationResult {
    std::vector<ChangePoint> change_points;
    std::size_t intervals_evaluated = 0;
    ResolvedSegmentation params;
};

// Per-interval single-change results, before greedy selection.
struct IntervalEvaluation {
    SeededInterval interval;
    DetectionOutcome outcome;
};

std::vector<IntervalEvaluation> evaluate_intervals(const DeltaTensor& tensor, std::span<const SeededInterval> intervals,
                                                   const DetectorConfig& cfg, const ResolvedSegmentation& params,
                                                   const WeightSpec& weights = {});

SegmentationResult segment_multiple(const BlockSeries& blocks, const DetectorConfig& cfg,
                                    const SegmentationConfig& seg = {}, const WeightSpec& weights = {});

} // namespace pcpd
