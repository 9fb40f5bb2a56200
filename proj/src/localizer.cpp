#include "pcpd/localizer.hpp"

#include "pcpd/errors.hpp"
#include "pcpd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pcpd {

MarginalTests marginal_tests(const BlockSeries& blocks, std::size_t t_hat, const DetectorConfig& cfg,
                             const WeightSpec& weights) {
    cfg.validate();
    const std::size_t k = blocks.blocks();
    if (t_hat < 1 || t_hat + 2 > k) {
        throw InputError("marginal_tests: need 1 <= t_hat <= K-2");
    }
    const auto keep = retained_blocks(k, t_hat);
    const std::size_t n = keep.size();
    const WeightSpec w = weights.restricted(keep);
    const double kd = static_cast<double>(k);
    const double prefactor = static_cast<double>(t_hat) * static_cast<double>(k - t_hat - 1) / (kd * kd);

    PermutationPlan plan = cfg.plan();
    if (cfg.bonferroni) {
        plan.alpha = cfg.alpha / static_cast<double>(blocks.period());
        // The wedge is tuned to the nominal level; use exact curtailment instead.
        if (plan.rule == StoppingRule::sequential_wedge) {
            plan.rule = StoppingRule::futility;
        }
    }

    MarginalTests out;
    for (std::size_t m = 1; m <= blocks.period(); ++m) {
        const auto& d = blocks.coordinate_distances(m);
        Eigen::MatrixXd sub(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                sub(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    d(static_cast<Eigen::Index>(keep[i]), static_cast<Eigen::Index>(keep[j]));
            }
        }
        const TwoSampleMdf stat(sub, w);
        std::vector<std::uint8_t> labels(n, 0);
        std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(t_hat), std::uint8_t{1});
        const double observed = prefactor * stat.evaluate(labels);

        const std::uint64_t stream = kMarginalStreamBase + m;
        auto make_worker = [&] {
            return [&stat, &cfg, stream, n, t_hat, prefactor, ws = TwoSampleMdf::Workspace{},
                    lab = std::vector<std::uint8_t>(n)](std::size_t l) mutable {
                const auto perm = random_permutation(n, derive_seed(cfg.master_seed, stream, l));
                std::fill(lab.begin(), lab.end(), std::uint8_t{0});
                for (std::size_t i = 0; i < t_hat; ++i) {
                    lab[perm[i]] = 1;
                }
                return prefactor * stat.evaluate(lab, ws);
            };
        };
        const auto res = run_permutation_test(observed, plan, make_worker);
        MarginalTest mt;
        mt.m = m;
        mt.statistic = observed;
        mt.p_value = res.p_value;
        mt.stopped_at = res.stopped_at;
        mt.rejected = res.decision == Decision::reject;
        if (mt.rejected) {
            out.V_n.push_back(m);
        }
        out.per_m.push_back(mt);
    }
    return out;
}

int majority_label(std::size_t c1, std::size_t c2) {
    return c2 > c1 ? 2 : 1;
}

Classification knn_classify(const BlockSeries& blocks, std::size_t m, std::size_t t_hat, std::size_t e_nn) {
    const std::size_t k = blocks.blocks();
    if (m < 1 || m > blocks.period()) {
        throw InputError("knn_classify: coordinate out of range");
    }
    if (t_hat < 1 || t_hat + 2 > k) {
        throw InputError("knn_classify: need 1 <= t_hat <= K-2");
    }
    if (e_nn < 1 || e_nn > k - 1) {
        throw InputError("knn_classify: e_nn must lie in 1..K-1, got " + std::to_string(e_nn));
    }
    // Change block is 0-based index t_hat.
    std::vector<double> d;
    d.reserve(k - 1);
    for (std::size_t i = 0; i < k; ++i) {
        if (i != t_hat) {
            d.push_back(blocks.distance(m, i, t_hat));
        }
    }
    std::vector<double> sorted = d;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(e_nn - 1), sorted.end());
    const double radius = sorted[e_nn - 1];

    Classification c;
    c.m = m;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] <= radius) {
            // Entries before t_hat are blocks 1..t_hat.
            (i < t_hat ? c.c1 : c.c2) += 1;
        }
    }
    c.label = majority_label(c.c1, c.c2);
    return c;
}

std::size_t within_block_index(std::span<const std::size_t> V_n, std::span<const Classification> classifications,
                               std::size_t period) {
    std::size_t best = period + 1;
    for (const auto nu : V_n) {
        const auto it = std::find_if(classifications.begin(), classifications.end(),
                                     [nu](const Classification& c) { return c.m == nu; });
        if (it == classifications.end()) {
            throw InputError("within_block_index: missing classification for coordinate " + std::to_string(nu));
        }
        if (it->label == 2) {
            best = std::min(best, nu);
        }
    }
    return best;
}

FinalLocation final_location(std::size_t t_hat, std::size_t nu_hat, std::size_t period, std::size_t n) {
    if (n == 0) {
        throw InputError("final_location: n must be positive");
    }
    FinalLocation f;
    f.l_F_hat = t_hat * period + nu_hat;
    f.tau_F_hat = static_cast<double>(f.l_F_hat) / static_cast<double>(n);
    return f;
}

std::size_t default_e_nn(std::size_t blocks) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(blocks)))));
}

LocalizationResult localize(const BlockSeries& blocks, std::size_t t_hat, const DetectorConfig& cfg,
                            const WeightSpec& weights, std::size_t n_total, std::size_t t_offset) {
    LocalizationResult out;
    out.e_nn = cfg.e_nn.value_or(default_e_nn(blocks.blocks()));
    out.marginal = marginal_tests(blocks, t_hat, cfg, weights);
    for (const auto nu : out.marginal.V_n) {
        out.classifications.push_back(knn_classify(blocks, nu, t_hat, out.e_nn));
    }
    out.nu_hat = within_block_index(out.marginal.V_n, out.classifications, blocks.period());
    out.location = final_location(t_hat + t_offset, out.nu_hat, blocks.period(),
                                  n_total == 0 ? blocks.objects() : n_total);
    return out;
}

} // namespace pcpd
