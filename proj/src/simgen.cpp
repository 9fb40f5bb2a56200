#include "pcpd/simgen.hpp"

#include "pcpd/errors.hpp"
#include "pcpd/localizer.hpp"
#include "pcpd/rng.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

namespace pcpd {

double default_size_schedule(std::size_t m, std::size_t period) {
    return 0.3 + 0.25 * std::sin(2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(period));
}

std::string_view to_string(NetworkLayout l) {
    switch (l) {
    case NetworkLayout::independent:
        return "independent";
    case NetworkLayout::block_latent:
        return "block_latent";
    case NetworkLayout::fixed_pattern:
        return "fixed_pattern";
    }
    return "fixed_pattern";
}

NetworkLayout parse_network_layout(std::string_view name) {
    for (const auto l : {NetworkLayout::independent, NetworkLayout::block_latent, NetworkLayout::fixed_pattern}) {
        if (name == to_string(l)) {
            return l;
        }
    }
    throw ConfigError("sim: unknown layout '" + std::string(name) +
                      "' (expected independent, block_latent or fixed_pattern)");
}

void SimConfig::validate() const {
    if (nodes < 2) {
        throw ConfigError("sim: need at least 2 nodes");
    }
    if (period < 1 || blocks < 2) {
        throw ConfigError("sim: need M >= 1 and K >= 2");
    }
    if (!(tau > 0.0 && tau < 1.0)) {
        throw ConfigError("sim: tau must lie in (0, 1)");
    }
    if (nu_star < 1 || nu_star > period) {
        throw ConfigError("sim: nu_star must lie in 1..M");
    }
    if (!(eta >= 0.0)) {
        throw ConfigError("sim: eta must be nonnegative");
    }
    if (!size_schedule.empty() && size_schedule.size() != period) {
        throw ConfigError("sim: size_schedule needs one probability per within-period position");
    }
    for (std::size_t m = 1; m <= period; ++m) {
        const double p = inclusion_probability(m);
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ConfigError("sim: inclusion probability outside [0, 1] at position " + std::to_string(m));
        }
    }
    if (!(day_factor >= 0.0 && day_factor < 1.0)) {
        throw ConfigError("sim: day_factor must lie in [0, 1)");
    }
    if (!(weight_high >= weight_low)) {
        throw ConfigError("sim: weight_high must be >= weight_low");
    }
    if (pre_change_blocks() + 1 > blocks) {
        throw ConfigError("sim: change block falls outside the series");
    }
}

std::size_t SimConfig::pre_change_blocks() const {
    return static_cast<std::size_t>(std::floor(static_cast<double>(blocks) * tau));
}

std::size_t SimConfig::change_index() const {
    return pre_change_blocks() * period + nu_star;
}

double SimConfig::true_tau() const {
    return static_cast<double>(change_index()) / static_cast<double>(objects());
}

double SimConfig::inclusion_probability(std::size_t m) const {
    return size_schedule.empty() ? default_size_schedule(m, period) : size_schedule[m - 1];
}

ObjectSeries generate_periodic_network_series(const SimConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(seed);
    const std::size_t n = cfg.objects();
    const std::size_t change = cfg.change_index();
    const auto p = static_cast<Eigen::Index>(cfg.nodes);
    const std::size_t pairs = cfg.nodes * (cfg.nodes - 1) / 2;
    std::vector<double> latent(pairs);
    std::vector<double> weight(pairs);
    auto draw = [&](std::vector<double>& v) {
        for (auto& x : v) {
            x = uniform01(rng);
        }
    };
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double rho = cfg.day_factor;
    const double spread = std::sqrt(1.0 - rho * rho);
    // Block weights: uniform marginals, common factor with correlation rho.
    auto draw_block_weights = [&] {
        if (rho == 0.0) {
            draw(weight);
            return;
        }
        const double z = gauss(rng);
        for (auto& x : weight) {
            x = 0.5 * std::erfc(-(rho * z + spread * gauss(rng)) / std::numbers::sqrt2);
        }
    };
    if (cfg.layout == NetworkLayout::fixed_pattern) {
        draw(latent);
    }
    std::vector<GraphLaplacian> out;
    out.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) {
        const std::size_t m =
            within_period_index(static_cast<std::int64_t>(i), static_cast<std::int64_t>(cfg.period));
        const bool block_start = m == 1;
        switch (cfg.layout) {
        case NetworkLayout::independent:
            draw(latent);
            draw(weight);
            break;
        case NetworkLayout::block_latent:
            if (block_start) {
                draw(latent);
                draw_block_weights();
            }
            break;
        case NetworkLayout::fixed_pattern:
            if (block_start) {
                draw_block_weights();
            }
            break;
        }
        const double prob = cfg.inclusion_probability(m);
        const bool shifted = i >= change;
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
        std::size_t pair = 0;
        for (Eigen::Index u = 0; u < p; ++u) {
            for (Eigen::Index v = u + 1; v < p; ++v, ++pair) {
                if (latent[pair] >= prob) {
                    continue;
                }
                double w = cfg.weight_low + (cfg.weight_high - cfg.weight_low) * weight[pair];
                if (shifted && pair % 2 == 0) {
                    w += cfg.eta;
                }
                w = std::max(w, 0.0);
                a(u, v) = w;
                a(v, u) = w;
            }
        }
        out.push_back(build_laplacian(a));
    }
    return ObjectSeries::from_laplacians(out);
}

ObjectSeries generate_periodic_vector_series(const VectorSimConfig& cfg, std::uint64_t seed) {
    if (cfg.dimension < 1 || cfg.period < 1 || cfg.blocks < 1) {
        throw ConfigError("vector sim: dimension, period and blocks must be positive");
    }
    if (!(cfg.block_sd >= 0.0) || !(cfg.noise_sd >= 0.0)) {
        throw ConfigError("vector sim: standard deviations must be nonnegative");
    }
    Rng rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    const std::size_t n = cfg.blocks * cfg.period;
    const auto dim = static_cast<Eigen::Index>(cfg.dimension);
    Eigen::VectorXd block_effect = Eigen::VectorXd::Zero(dim);
    std::vector<Eigen::VectorXd> out;
    out.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) {
        const auto m = within_period_index(static_cast<std::int64_t>(i), static_cast<std::int64_t>(cfg.period));
        if (m == 1) {
            for (Eigen::Index d = 0; d < dim; ++d) {
                block_effect(d) = cfg.block_sd * noise(rng);
            }
        }
        double mean = cfg.amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(m) /
                                               static_cast<double>(cfg.period));
        for (const auto& [at, shift] : cfg.changes) {
            if (i >= at) {
                mean += shift;
            }
        }
        Eigen::VectorXd x(dim);
        for (Eigen::Index d = 0; d < dim; ++d) {
            x(d) = mean + block_effect(d) + cfg.noise_sd * noise(rng);
        }
        out.push_back(std::move(x));
    }
    return ObjectSeries::from_vectors(std::move(out));
}

MonteCarloSummary run_monte_carlo(const SimConfig& sim, const DetectorConfig& detector) {
    sim.validate();
    detector.validate();
    if (sim.runs < 1) {
        throw ConfigError("monte carlo: runs must be at least 1");
    }
    MonteCarloSummary s;
    s.eta = sim.eta;
    s.runs = sim.runs;
    s.nu_histogram.assign(sim.period + 1, 0);
    s.nu_histogram_at_truth.assign(sim.period + 1, 0);
    const std::size_t truth = sim.pre_change_blocks();
    double abs_dev = 0.0;
    for (std::size_t r = 0; r < sim.runs; ++r) {
        const auto series = generate_periodic_network_series(sim, derive_seed(sim.seed, 0xda7a, r));
        const auto blocks = blockify(series, sim.period);
        DetectorConfig cfg = detector;
        cfg.master_seed = derive_seed(sim.seed, 0xdec0, r);
        const auto outcome = detect_single(blocks, cfg);
        if (outcome.decision == Decision::reject) {
            ++s.rejections;
        }
        std::size_t nu_hat = sim.period + 1;
        FinalLocation loc;
        if (outcome.t_hat + 2 <= blocks.blocks()) {
            const auto l = localize(blocks, outcome.t_hat, cfg);
            nu_hat = l.nu_hat;
            loc = l.location;
        } else {
            loc = final_location(outcome.t_hat, nu_hat, sim.period, series.size());
        }
        if (truth >= 1 && truth + 2 <= blocks.blocks()) {
            const auto at_truth = outcome.t_hat == truth ? nu_hat : localize(blocks, truth, cfg).nu_hat;
            ++s.nu_histogram_at_truth[at_truth - 1];
        }
        abs_dev += std::abs(loc.tau_F_hat - sim.true_tau());
        s.tau_F_hat.push_back(loc.tau_F_hat);
        s.t_hat.push_back(outcome.t_hat);
        if (outcome.t_hat < truth) {
            ++s.cases[0];
        } else if (outcome.t_hat == truth) {
            ++s.cases[1];
            ++s.nu_histogram[nu_hat - 1];
        } else {
            ++s.cases[2];
        }
    }
    s.power = static_cast<double>(s.rejections) / static_cast<double>(sim.runs);
    s.mad = abs_dev / static_cast<double>(sim.runs);
    return s;
}

double estimate_delta(const BlockSeries& blocks, std::span<const std::size_t> first,
                      std::span<const std::size_t> second, const WeightSpec& weights) {
    if (first.empty() || second.empty()) {
        throw InputError("estimate_delta: both samples must be nonempty");
    }
    const auto tensor = DeltaTensor::build_joint(blocks);
    std::vector<std::size_t> pooled(first.begin(), first.end());
    pooled.insert(pooled.end(), second.begin(), second.end());
    for (const auto b : pooled) {
        if (b >= blocks.blocks()) {
            throw InputError("estimate_delta: block index out of range");
        }
    }
    const std::size_t n1 = first.size();
    const std::size_t n = pooled.size();
    const double d1 = static_cast<double>(n1);
    const double d2 = static_cast<double>(n - n1);
    double total = 0.0;
    for (int side = 0; side < 2; ++side) {
        const std::size_t lo = side == 0 ? 0 : n1;
        const std::size_t hi = side == 0 ? n1 : n;
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            for (std::size_t j = lo; j < hi; ++j) {
                double c1 = 0.0;
                double c2 = 0.0;
                for (std::size_t x = 0; x < n; ++x) {
                    if (tensor(pooled[i], pooled[j], pooled[x])) {
                        (x < n1 ? c1 : c2) += 1.0;
                    }
                }
                const double diff = c1 / d1 - c2 / d2;
                acc += weights(pooled[i], pooled[j]) * diff * diff;
            }
        }
        const double size = static_cast<double>(hi - lo);
        total += acc / (size * size);
    }
    return total;
}

double estimate_delta(const ObjectSeries& first, const ObjectSeries& second, std::size_t period,
                      const WeightSpec& weights) {
    if (period < 1 || first.size() % period != 0 || second.size() % period != 0) {
        throw InputError("estimate_delta: each sample must hold whole periods");
    }
    if (first.size() == 0 || second.size() == 0) {
        throw InputError("estimate_delta: both samples must be nonempty");
    }
    const auto pooled = first.concat(second);
    const auto blocks = blockify(pooled, period);
    const std::size_t k1 = first.size() / period;
    std::vector<std::size_t> a(k1);
    std::vector<std::size_t> b(blocks.blocks() - k1);
    std::iota(a.begin(), a.end(), std::size_t{0});
    std::iota(b.begin(), b.end(), k1);
    return estimate_delta(blocks, a, b, weights);
}

} // namespace pcpd
