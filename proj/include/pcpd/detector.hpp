#pragma once

#include "pcpd/blocking.hpp"
#include "pcpd/delta_tensor.hpp"
#include "pcpd/mdf.hpp"
#include "pcpd/permutation.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace pcpd {

struct DetectorConfig {
    double b = 0.1;
    double alpha = 0.05;
    std::size_t max_perms = 500;
    bool early_stop = true;
    std::uint64_t master_seed = 0;
    std::size_t threads = 0; // 0 = hardware concurrency

    // Localization knobs.
    std::optional<std::size_t> e_nn; // default floor(sqrt(K))
    bool bonferroni = false;         // per-coordinate level alpha / M

    void validate() const;
    PermutationPlan plan() const;
};

struct DetectionOutcome {
    double B_hat = 0.0;    // K * max_t B_n(t/K)
    std::size_t t_hat = 0; // blocks before the split; change block is t_hat + 1
    double tau_b_hat = 0.0;
    double p_value = 1.0;
    std::size_t stopped_at = 0;
    Decision decision = Decision::fail_to_reject;
    std::vector<ScanPoint> scan_curve;
    std::size_t blocks = 0;
};

// Substream tags for derive_seed.
inline constexpr std::uint64_t kGlobalScanStream = 0x5ca11;
inline constexpr std::uint64_t kMarginalStreamBase = 0x3a4900;
inline constexpr std::uint64_t kIntervalStreamBase = 0x1e7000000;

// Permutation p-value of `observed` for the scan over `scan`'s block sequence.
// Permutation l shuffles sequence positions using derive_seed(seed, stream, l).
PermutationResult permutation_pvalue(const ScanStatistic& scan, double observed, const DetectorConfig& cfg,
                                     std::uint64_t stream = kGlobalScanStream);
PermutationResult permutation_pvalue(const ScanStatistic& scan, double observed, std::uint64_t master_seed,
                                     const PermutationPlan& plan, std::uint64_t stream);

DetectionOutcome detect_single(const ScanStatistic& scan, const DetectorConfig& cfg,
                               std::uint64_t stream = kGlobalScanStream);
DetectionOutcome detect_single(const ScanStatistic& scan, const DetectorConfig& cfg, const PermutationPlan& plan,
                               std::uint64_t stream);

DetectionOutcome detect_single(const DeltaTensor& tensor, const DetectorConfig& cfg, const WeightSpec& weights = {});

DetectionOutcome detect_single(const BlockSeries& blocks, const DetectorConfig& cfg, const WeightSpec& weights = {});

} // namespace pcpd
