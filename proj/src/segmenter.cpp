#include "pcpd/segmenter.hpp"

#include "pcpd/errors.hpp"
#include "pcpd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace pcpd {

std::vector<SeededInterval> seeded_intervals(std::size_t blocks, double decay, std::size_t min_len) {
    if (!(decay >= 0.5 && decay < 1.0)) {
        throw ConfigError("seeded intervals: decay must lie in [0.5, 1)");
    }
    if (min_len < 2) {
        throw ConfigError("seeded intervals: min_interval_len must be at least 2");
    }
    if (blocks < min_len) {
        throw ConfigError("seeded intervals: K=" + std::to_string(blocks) + " is below min_interval_len=" +
                          std::to_string(min_len));
    }
    std::vector<SeededInterval> out;
    const double k = static_cast<double>(blocks);
    for (std::size_t layer = 0;; ++layer) {
        // ceil with a little slack so K a^l landing on an integer is not bumped up.
        const double exact = k * std::pow(decay, static_cast<double>(layer));
        const auto len = static_cast<std::size_t>(std::ceil(exact - 1e-9));
        if (len < min_len) {
            break;
        }
        const std::size_t count = 2 * ((blocks + len - 1) / len) - 1;
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t start = count == 1 ? 0 : (i * (blocks - len)) / (count - 1);
            const SeededInterval iv{start + 1, start + len, layer};
            const bool seen = std::any_of(out.begin(), out.end(), [&](const SeededInterval& o) {
                return o.lo == iv.lo && o.hi == iv.hi;
            });
            if (!seen) {
                out.push_back(iv);
            }
        }
    }
    return out;
}

ResolvedSegmentation resolve(const SegmentationConfig& seg, const DetectorConfig& cfg, std::size_t blocks) {
    cfg.validate();
    ResolvedSegmentation r;
    r.decay = seg.decay;
    r.min_interval_len = seg.min_interval_len.value_or(
        std::max<std::size_t>(10, static_cast<std::size_t>(std::ceil(2.0 / cfg.b - 1e-9))));
    if (r.min_interval_len < 4) {
        throw ConfigError("min_interval_len must be at least 4");
    }
    r.min_gap = seg.min_gap.value_or((r.min_interval_len + 1) / 2);
    if (r.min_gap < 1) {
        throw ConfigError("min_gap must be at least 1");
    }
    if (blocks < 2 * r.min_interval_len) {
        throw ConfigError("segment: need K >= 2 * min_interval_len (K=" + std::to_string(blocks) +
                          ", min_interval_len=" + std::to_string(r.min_interval_len) + ")");
    }
    r.intervals = seeded_intervals(blocks, r.decay, r.min_interval_len).size();
    r.alpha_seg = seg.alpha_seg.value_or(cfg.alpha / static_cast<double>(r.intervals));
    if (!(r.alpha_seg > 0.0 && r.alpha_seg < 1.0)) {
        throw ConfigError("alpha_seg must lie in (0, 1)");
    }
    r.max_perms = seg.max_perms.value_or(
        std::max(cfg.max_perms, static_cast<std::size_t>(std::ceil(2.0 / r.alpha_seg))));
    if (r.max_perms < 1) {
        throw ConfigError("segment: max_perms must be at least 1");
    }
    return r;
}

std::vector<IntervalEvaluation> evaluate_intervals(const DeltaTensor& tensor, std::span<const SeededInterval> intervals,
                                                   const DetectorConfig& cfg, const ResolvedSegmentation& params,
                                                   const WeightSpec& weights) {
    PermutationPlan plan;
    plan.max_perms = params.max_perms;
    plan.alpha = params.alpha_seg;
    plan.threads = cfg.threads;
    plan.rule = cfg.early_stop ? StoppingRule::futility : StoppingRule::none;

    std::vector<IntervalEvaluation> out;
    out.reserve(intervals.size());
    for (std::size_t idx = 0; idx < intervals.size(); ++idx) {
        const auto& iv = intervals[idx];
        std::vector<std::size_t> members(iv.length());
        std::iota(members.begin(), members.end(), iv.lo - 1);
        const ScanStatistic scan(tensor, weights, cfg.b, std::move(members));
        out.push_back({iv, detect_single(scan, cfg, plan, kIntervalStreamBase + idx)});
    }
    return out;
}

SegmentationResult segment_multiple(const BlockSeries& blocks, const DetectorConfig& cfg,
                                    const SegmentationConfig& seg, const WeightSpec& weights) {
    const std::size_t k = blocks.blocks();
    SegmentationResult result;
    result.params = resolve(seg, cfg, k);
    const auto& params = result.params;
    const auto intervals = seeded_intervals(k, params.decay, params.min_interval_len);

    const auto tensor = DeltaTensor::build_joint(blocks, cfg.threads);
    const auto evals = evaluate_intervals(tensor, intervals, cfg, params, weights);
    result.intervals_evaluated = evals.size();

    // Narrowest significant interval first; ties by p-value, then position.
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < evals.size(); ++i) {
        if (evals[i].outcome.decision == Decision::reject) {
            order.push_back(i);
        }
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = evals[a];
        const auto& y = evals[b];
        if (x.interval.length() != y.interval.length()) {
            return x.interval.length() < y.interval.length();
        }
        if (x.outcome.p_value != y.outcome.p_value) {
            return x.outcome.p_value < y.outcome.p_value;
        }
        return x.interval.lo < y.interval.lo;
    });

    std::vector<bool> removed(evals.size(), false);
    for (const auto idx : order) {
        if (removed[idx]) {
            continue;
        }
        const auto& ev = evals[idx];
        ChangePoint cp{};
        cp.t_hat = ev.interval.lo - 1 + ev.outcome.t_hat;
        cp.p_value = ev.outcome.p_value;
        cp.interval = ev.interval;
        result.change_points.push_back(std::move(cp));

        // Guard zone: blocks within min_gap of the split on either side.
        const std::size_t zone_lo = cp.t_hat + 1 > params.min_gap ? cp.t_hat + 1 - params.min_gap : 1;
        const std::size_t zone_hi = cp.t_hat + params.min_gap;
        for (std::size_t j = 0; j < evals.size(); ++j) {
            const auto& iv = evals[j].interval;
            if (iv.lo <= zone_hi && iv.hi >= zone_lo) {
                removed[j] = true;
            }
        }
    }
    std::sort(result.change_points.begin(), result.change_points.end(),
              [](const ChangePoint& a, const ChangePoint& b) { return a.t_hat < b.t_hat; });

    // Localize each change inside the stretch bounded by its neighbours.
    const std::size_t m = blocks.period();
    const std::size_t n = blocks.objects();
    for (std::size_t c = 0; c < result.change_points.size(); ++c) {
        auto& cp = result.change_points[c];
        const std::size_t first = c == 0 ? 1 : result.change_points[c - 1].t_hat + 2;
        const std::size_t last = c + 1 == result.change_points.size() ? k : result.change_points[c + 1].t_hat;
        const bool feasible = seg.localize && first <= cp.t_hat && cp.t_hat + 2 <= last;
        if (feasible) {
            const auto local = blocks.slice(first - 1, last - 1);
            const std::size_t local_t = cp.t_hat - (first - 1);
            DetectorConfig loc_cfg = cfg;
            loc_cfg.master_seed = derive_seed(cfg.master_seed, 0x10ca1, cp.t_hat);
            if (loc_cfg.e_nn) {
                loc_cfg.e_nn = std::min(*loc_cfg.e_nn, local.blocks() - 1);
            }
            std::vector<std::size_t> members(local.blocks());
            std::iota(members.begin(), members.end(), first - 1);
            cp.localization = localize(local, local_t, loc_cfg, weights.restricted(members), n, first - 1);
            cp.l_F_hat = cp.localization->location.l_F_hat;
            cp.tau_F_hat = cp.localization->location.tau_F_hat;
        } else {
            const auto loc = final_location(cp.t_hat, m + 1, m, n);
            cp.l_F_hat = loc.l_F_hat;
            cp.tau_F_hat = loc.tau_F_hat;
        }
    }
    return result;
}

} // namespace pcpd
