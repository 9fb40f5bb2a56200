#include "pcpd/detector.hpp"

#include "pcpd/errors.hpp"
#include "pcpd/rng.hpp"

#include <cmath>
#include <string>

namespace pcpd {

void DetectorConfig::validate() const {
    if (!(b > 0.0 && b < 0.5)) {
        throw ConfigError("b must lie in (0, 1/2)");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ConfigError("alpha must lie in (0, 1)");
    }
    if (max_perms < 1) {
        throw ConfigError("max_perms must be at least 1");
    }
    if (e_nn && *e_nn < 1) {
        throw ConfigError("e_nn must be at least 1");
    }
}

PermutationPlan DetectorConfig::plan() const {
    PermutationPlan p;
    p.max_perms = max_perms;
    p.alpha = alpha;
    p.rule = early_stop ? StoppingRule::sequential_wedge : StoppingRule::none;
    p.threads = threads;
    return p;
}

PermutationResult permutation_pvalue(const ScanStatistic& scan, double observed, std::uint64_t master_seed,
                                     const PermutationPlan& plan, std::uint64_t stream) {
    const std::size_t k = scan.size();
    const double kd = static_cast<double>(k);
    auto make_worker = [&] {
        return [&scan, master_seed, stream, k, kd, ws = ScanStatistic::Workspace{}](std::size_t l) mutable {
            const auto order = random_permutation(k, derive_seed(master_seed, stream, l));
            return kd * scan.maximize(order, ws).value;
        };
    };
    return run_permutation_test(observed, plan, make_worker);
}

PermutationResult permutation_pvalue(const ScanStatistic& scan, double observed, const DetectorConfig& cfg,
                                     std::uint64_t stream) {
    cfg.validate();
    return permutation_pvalue(scan, observed, cfg.master_seed, cfg.plan(), stream);
}

DetectionOutcome detect_single(const ScanStatistic& scan, const DetectorConfig& cfg, std::uint64_t stream) {
    cfg.validate();
    return detect_single(scan, cfg, cfg.plan(), stream);
}

DetectionOutcome detect_single(const ScanStatistic& scan, const DetectorConfig& cfg, const PermutationPlan& plan,
                               std::uint64_t stream) {
    cfg.validate();
    if (scan.size() < 4) {
        throw ConfigError("detect_single: need at least 4 blocks, got " + std::to_string(scan.size()));
    }
    ScanStatistic::Workspace ws;
    DetectionOutcome out;
    out.blocks = scan.size();
    out.scan_curve = scan.curve({}, ws);
    const double kd = static_cast<double>(scan.size());
    double best = -1.0;
    for (const auto& p : out.scan_curve) {
        if (p.value > best) {
            best = p.value;
            out.t_hat = p.t;
        }
    }
    // Same arithmetic path as the permuted statistics, so ties compare exactly.
    out.B_hat = kd * best;
    out.tau_b_hat = static_cast<double>(out.t_hat) / kd;
    const auto perm = permutation_pvalue(scan, out.B_hat, cfg.master_seed, plan, stream);
    out.p_value = perm.p_value;
    out.stopped_at = perm.stopped_at;
    out.decision = perm.decision;
    return out;
}

DetectionOutcome detect_single(const DeltaTensor& tensor, const DetectorConfig& cfg, const WeightSpec& weights) {
    cfg.validate();
    ScanStatistic scan(tensor, weights, cfg.b);
    return detect_single(scan, cfg);
}

DetectionOutcome detect_single(const BlockSeries& blocks, const DetectorConfig& cfg, const WeightSpec& weights) {
    cfg.validate();
    const auto tensor = DeltaTensor::build_joint(blocks, cfg.threads);
    return detect_single(tensor, cfg, weights);
}

} // namespace pcpd
