#pragma once

#include "pcpd/blocking.hpp"
#include "pcpd/detector.hpp"
#include "pcpd/mdf.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace pcpd {

struct MarginalTest {
    std::size_t m = 0; // 1-based coordinate
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t stopped_at = 0;
    bool rejected = false;
};

struct MarginalTests {
    std::vector<std::size_t> V_n; // coordinates whose marginal null was rejected
    std::vector<MarginalTest> per_m;
};

struct Classification {
    std::size_t m = 0;
    int label = 1; // 1 = pre-change law, 2 = post-change law
    std::size_t c1 = 0;
    std::size_t c2 = 0;
};

struct FinalLocation {
    std::size_t l_F_hat = 0; // 1-based index of the first observation of the new regime
    double tau_F_hat = 0.0;
};

struct LocalizationResult {
    MarginalTests marginal;
    std::vector<Classification> classifications;
    std::size_t nu_hat = 0;
    std::size_t e_nn = 0;
    FinalLocation location;
};

// Permutation test of each coordinate's marginal law, blocks 1..t_hat versus
// t_hat+2..K, permuting the K-1 retained blocks at the fixed split.
MarginalTests marginal_tests(const BlockSeries& blocks, std::size_t t_hat, const DetectorConfig& cfg,
                             const WeightSpec& weights = {});

// Majority vote with ties going to the pre-change law.
int majority_label(std::size_t c1, std::size_t c2);

Classification knn_classify(const BlockSeries& blocks, std::size_t m, std::size_t t_hat, std::size_t e_nn);

// Smallest coordinate in V_n classified as post-change, else M + 1.
std::size_t within_block_index(std::span<const std::size_t> V_n, std::span<const Classification> classifications,
                               std::size_t period);

FinalLocation final_location(std::size_t t_hat, std::size_t nu_hat, std::size_t period, std::size_t n);

std::size_t default_e_nn(std::size_t blocks);

// Full within-block localization. `n_total` is the series length used for
// tau_F (defaults to blocks.objects()); `t_offset` shifts t_hat into global
// block numbering when `blocks` is a slice.
LocalizationResult localize(const BlockSeries& blocks, std::size_t t_hat, const DetectorConfig& cfg,
                            const WeightSpec& weights = {}, std::size_t n_total = 0, std::size_t t_offset = 0);

} // namespace pcpd
