#pragma once

#include "pcpd/blocking.hpp"
#include "pcpd/detector.hpp"
#include "pcpd/mdf.hpp"
#include "pcpd/metric.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace pcpd {

// Where the randomness of a network lives. Every layout gives each network
// edge-inclusion probability size_schedule(m) and weights uniform on
// [weight_low, weight_high]; they differ in dependence between networks.
//   independent    fresh edge draws and weights for every observation
//   block_latent   one edge latent and weight per pair per block, shared by
//                  the M networks of that block (nested edge sets)
//   fixed_pattern  one edge latent per pair for the whole series, weights
//                  drawn per block and shared inside it
enum class NetworkLayout { independent, block_latent, fixed_pattern };
std::string_view to_string(NetworkLayout l);
NetworkLayout parse_network_layout(std::string_view name);

/// Periodic random weighted networks with one planted distributional change.
///
/// Observation i (1-based) sits at within-period position m = r(i); pair uv
/// is an edge when its latent uniform falls below size_schedule(m). From the
/// change index on, weights on a fixed half of the node pairs are raised by
/// eta.
struct SimConfig {
    std::size_t nodes = 20;
    std::size_t period = 13;
    std::size_t blocks = 50;
    double tau = 0.5;
    std::size_t nu_star = 10; // within-block position of the first post-change observation
    double eta = 0.0;
    std::vector<double> size_schedule; // inclusion probability per position 1..M; empty = default profile
    double weight_low = 0.0;
    double weight_high = 1.0;
    NetworkLayout layout = NetworkLayout::fixed_pattern;
    // Correlation of a block-wide activity factor in the weights (Gaussian
    // copula, so each weight stays uniform on [weight_low, weight_high]).
    // Ignored by the independent layout.
    double day_factor = 0.0;
    std::size_t runs = 50;
    std::uint64_t seed = 1;

    void validate() const;
    std::size_t objects() const noexcept { return blocks * period; }
    // Blocks entirely before the change: floor(K tau).
    std::size_t pre_change_blocks() const;
    // 1-based index of the first post-change observation.
    std::size_t change_index() const;
    double true_tau() const;
    double inclusion_probability(std::size_t m) const;
};

// 0.3 + 0.25 sin(2 pi m / M)
double default_size_schedule(std::size_t m, std::size_t period);

ObjectSeries generate_periodic_network_series(const SimConfig& cfg, std::uint64_t seed);

// Gaussian vectors with a periodic mean profile amplitude * sin(2 pi m / M) in
// every component, a block effect N(0, block_sd^2) shared by the M vectors of
// a block, and independent N(0, noise_sd^2) noise. Each change (first affected
// observation, 1-based; shift) adds `shift` to all components from that
// observation on.
struct VectorSimConfig {
    std::size_t dimension = 3;
    std::size_t period = 4;
    std::size_t blocks = 50;
    double amplitude = 1.0;
    double block_sd = 1.0;
    double noise_sd = 0.3;
    std::vector<std::pair<std::size_t, double>> changes;
};

ObjectSeries generate_periodic_vector_series(const VectorSimConfig& cfg, std::uint64_t seed);

struct MonteCarloSummary {
    double eta = 0.0;
    std::size_t runs = 0;
    std::size_t rejections = 0;
    double power = 0.0;
    double mad = 0.0;
    std::vector<std::size_t> nu_histogram;     // index nu - 1 for nu in 1..M+1, runs with the correct block
    std::vector<std::size_t> nu_histogram_at_truth; // every run, localizing inside the true change block
    std::array<std::size_t, 3> cases{0, 0, 0}; // estimated block before / equal / after the truth
    std::vector<double> tau_F_hat;
    std::vector<std::size_t> t_hat;
};

MonteCarloSummary run_monte_carlo(const SimConfig& sim, const DetectorConfig& detector);

// Plug-in divergence between two samples of blocks using joint empirical MDFs.
double estimate_delta(const BlockSeries& blocks, std::span<const std::size_t> first,
                      std::span<const std::size_t> second, const WeightSpec& weights = {});
double estimate_delta(const ObjectSeries& first, const ObjectSeries& second, std::size_t period,
                      const WeightSpec& weights = {});

} // namespace pcpd
