#include "catch_amalgamated.hpp"

#include "pcpd/detector.hpp"
#include "pcpd/errors.hpp"
#include "pcpd/localizer.hpp"
#include "pcpd/permutation.hpp"
#include "pcpd/rng.hpp"
#include "pcpd/segmenter.hpp"
#include "pcpd/simgen.hpp"

#include <random>

using namespace pcpd;
using Catch::Approx;

namespace {

ObjectSeries scalars(const std::vector<double>& xs) {
    std::vector<Eigen::VectorXd> out;
    for (const double x : xs) {
        out.push_back(Eigen::VectorXd::Constant(1, x));
    }
    return ObjectSeries::from_vectors(std::move(out));
}

// K blocks of M = 1, standard normal 3-vectors, the last K - split shifted.
BlockSeries shifted_normals(std::size_t k, std::size_t split, double shift, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> g;
    std::vector<Eigen::VectorXd> out;
    for (std::size_t i = 0; i < k; ++i) {
        Eigen::VectorXd v(3);
        for (Eigen::Index c = 0; c < 3; ++c) {
            v(c) = g(rng) + (i >= split ? shift : 0.0);
        }
        out.push_back(v);
    }
    return blockify(ObjectSeries::from_vectors(std::move(out)), 1);
}

} // namespace

TEST_CASE("wedge boundaries", "[permutation]") {
    CHECK(reject_boundary(110) == Approx(0.031).margin(0.001));
    CHECK(accept_boundary(100) == Approx(10.33).margin(0.01));
    CHECK(accept_boundary(50) == Approx(7.87).margin(0.01));
    CHECK(reject_boundary(50) == Approx(-2.93).margin(0.01));
    CHECK(early_stop_decision(110, 0) == EarlyStop::reject_null);
    CHECK(early_stop_decision(109, 0) == EarlyStop::continue_sampling);
    CHECK(early_stop_decision(100, 11) == EarlyStop::accept_null);
    CHECK(early_stop_decision(100, 10) == EarlyStop::continue_sampling);
    CHECK(early_stop_decision(50, 3) == EarlyStop::continue_sampling);
}

TEST_CASE("permutation p-value counts", "[permutation]") {
    PermutationPlan plan;
    plan.max_perms = 500;
    plan.rule = StoppingRule::none;
    SequentialPermutationTest below(1.0, plan);
    for (int l = 0; l < 500; ++l) {
        below.add(0.5);
    }
    CHECK(below.done());
    CHECK(below.result().p_value == 1.0 / 501.0);
    CHECK(below.result().decision == Decision::reject);

    SequentialPermutationTest ties(1.0, plan);
    for (int l = 0; l < 500; ++l) {
        ties.add(1.0);
    }
    CHECK(ties.result().p_value == 1.0);
    CHECK(ties.result().exceedances == 500);

    plan.rule = StoppingRule::sequential_wedge;
    SequentialPermutationTest wedge(1.0, plan);
    while (!wedge.add(0.0)) {
    }
    CHECK(wedge.result().stopped_at == 110);
    CHECK(wedge.result().decision == Decision::reject);

    // Futility: with L = 99 and alpha = 0.05 the fifth exceedance ends it.
    plan.rule = StoppingRule::futility;
    plan.max_perms = 99;
    SequentialPermutationTest fut(1.0, plan);
    int steps = 0;
    while (!fut.add(steps % 2 == 0 ? 2.0 : 0.0)) {
        ++steps;
    }
    CHECK(fut.result().exceedances == 5);
    CHECK(fut.result().stopped_at == 9);
    CHECK(fut.result().decision == Decision::fail_to_reject);
}

TEST_CASE("seed derivation", "[permutation]") {
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 3));
    CHECK(random_permutation(10, 4) == random_permutation(10, 4));
    auto p = random_permutation(50, 4);
    std::sort(p.begin(), p.end());
    for (std::size_t i = 0; i < 50; ++i) {
        CHECK(p[i] == i);
    }
}

TEST_CASE("detector finds a large shift", "[detector]") {
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        DetectorConfig cfg;
        cfg.master_seed = seed;
        const auto out = detect_single(shifted_normals(40, 20, 5.0, 1000 + seed), cfg);
        hits += out.decision == Decision::reject && out.t_hat == 20 ? 1 : 0;
        CHECK(out.B_hat == Approx(40.0 * out.scan_curve[out.t_hat - out.scan_curve.front().t].value));
        CHECK(out.tau_b_hat == static_cast<double>(out.t_hat) / 40.0);
    }
    CHECK(hits >= 19);
}

TEST_CASE("identical blocks never reject", "[detector]") {
    std::vector<double> xs;
    for (int i = 0; i < 20 * 3; ++i) {
        xs.push_back(i % 3);
    }
    const auto blocks = blockify(scalars(xs), 3);
    for (std::uint64_t seed : {1u, 2u, 99u}) {
        DetectorConfig cfg;
        cfg.master_seed = seed;
        const auto out = detect_single(blocks, cfg);
        CHECK(out.decision == Decision::fail_to_reject);
        CHECK(out.p_value == 1.0);
        CHECK(out.B_hat == 0.0);
    }
}

TEST_CASE("all permutations below the observed value", "[detector]") {
    DetectorConfig cfg;
    cfg.early_stop = false;
    cfg.master_seed = 3;
    const auto out = detect_single(shifted_normals(40, 20, 50.0, 7), cfg);
    CHECK(out.p_value == 1.0 / 501.0);
    CHECK(out.stopped_at == 500);
}

TEST_CASE("detection is reproducible across thread counts", "[detector]") {
    const auto blocks = shifted_normals(40, 25, 0.6, 11);
    DetectorConfig cfg;
    cfg.master_seed = 42;
    cfg.early_stop = false;
    cfg.max_perms = 300;
    cfg.threads = 1;
    const auto a = detect_single(blocks, cfg);
    cfg.threads = 4;
    const auto b = detect_single(blocks, cfg);
    CHECK(a.p_value == b.p_value);
    CHECK(a.stopped_at == b.stopped_at);
    CHECK(a.B_hat == b.B_hat);
    cfg.early_stop = true;
    cfg.threads = 1;
    const auto c = detect_single(blocks, cfg);
    cfg.threads = 3;
    const auto d = detect_single(blocks, cfg);
    CHECK(c.p_value == d.p_value);
    CHECK(c.stopped_at == d.stopped_at);
}

TEST_CASE("detector config validation", "[detector]") {
    DetectorConfig cfg;
    cfg.alpha = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.b = 0.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.max_perms = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    // Too few blocks for any candidate split.
    CHECK_THROWS_AS(detect_single(shifted_normals(3, 1, 1.0, 1), DetectorConfig{}), std::invalid_argument);
}

TEST_CASE("majority vote and knn", "[localizer]") {
    CHECK(majority_label(3, 1) == 1);
    CHECK(majority_label(1, 3) == 2);
    CHECK(majority_label(2, 2) == 1);

    // Segments {0, 0.1, 0.2} and {5, 5.1}; change block holds 5.05.
    const auto blocks = blockify(scalars({0.0, 0.1, 0.2, 5.05, 5.0, 5.1}), 1);
    const auto c = knn_classify(blocks, 1, 3, 3);
    CHECK(c.c1 == 1);
    CHECK(c.c2 == 2);
    CHECK(c.label == 2);
    // Both second-segment points sit at the radius: closed ball keeps both.
    const auto tie = knn_classify(blocks, 1, 3, 1);
    CHECK(tie.c1 + tie.c2 == 2);
    CHECK(tie.label == 2);
    CHECK_THROWS_AS(knn_classify(blocks, 1, 3, 6), InputError);
    CHECK(default_e_nn(50) == 7);
    CHECK(default_e_nn(200) == 14);
}

TEST_CASE("within-block index rule", "[localizer]") {
    const std::vector<std::size_t> vn{3, 7, 10};
    const std::vector<Classification> cls{{3, 1, 3, 1}, {7, 2, 1, 3}, {10, 2, 0, 4}};
    CHECK(within_block_index(vn, cls, 13) == 7);
    const std::vector<Classification> ones{{3, 1, 3, 1}, {7, 1, 3, 1}, {10, 1, 2, 2}};
    CHECK(within_block_index(vn, ones, 13) == 14);
    CHECK(within_block_index({}, {}, 13) == 14);
}

TEST_CASE("final location arithmetic", "[localizer]") {
    const auto loc = final_location(100, 10, 13, 2600);
    CHECK(loc.l_F_hat == 1310);
    CHECK(loc.tau_F_hat == 1310.0 / 2600.0);
    // nu = M + 1 lands on the first observation of block t_hat + 2.
    CHECK(final_location(100, 14, 13, 2600).l_F_hat == 101 * 13 + 1);
    CHECK(final_location(3, 1, 4, 40).l_F_hat == 13);
}

TEST_CASE("marginal tests pick out the changed coordinate", "[localizer]") {
    int found = 0;
    std::size_t false_hits = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Rng rng(seed);
        std::normal_distribution<double> g;
        std::vector<Eigen::VectorXd> objs;
        const std::size_t k = 30;
        const std::size_t t_hat = 15;
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t m = 1; m <= 4; ++m) {
                objs.push_back(Eigen::VectorXd::Constant(1, g(rng) + (m == 3 && i >= t_hat ? 10.0 : 0.0)));
            }
        }
        const auto blocks = blockify(ObjectSeries::from_vectors(objs), 4);
        DetectorConfig cfg;
        cfg.master_seed = seed;
        const auto mt = marginal_tests(blocks, t_hat, cfg);
        REQUIRE(mt.per_m.size() == 4);
        found += std::find(mt.V_n.begin(), mt.V_n.end(), 3u) != mt.V_n.end() ? 1 : 0;
        false_hits += mt.V_n.size() - (std::find(mt.V_n.begin(), mt.V_n.end(), 3u) != mt.V_n.end() ? 1 : 0);
        const auto loc = localize(blocks, t_hat, cfg);
        CHECK(loc.e_nn == 5);
    }
    CHECK(found == 10);
    CHECK(false_hits <= 4);
}

TEST_CASE("constant coordinate gives p = 1", "[localizer]") {
    std::vector<double> xs;
    Rng rng(2);
    for (int i = 0; i < 20; ++i) {
        xs.push_back(7.0);
        xs.push_back(uniform01(rng));
    }
    const auto blocks = blockify(scalars(xs), 2);
    DetectorConfig cfg;
    const auto mt = marginal_tests(blocks, 8, cfg);
    CHECK(mt.per_m[0].statistic == 0.0);
    CHECK(mt.per_m[0].p_value == 1.0);
    CHECK_FALSE(mt.per_m[0].rejected);
}

TEST_CASE("seeded intervals at K=16", "[segmenter]") {
    const auto iv = seeded_intervals(16, 0.70710678118654752, 8);
    const std::vector<SeededInterval> want{
        {1, 16, 0}, {1, 12, 1}, {3, 14, 1}, {5, 16, 1}, {1, 8, 2}, {5, 12, 2}, {9, 16, 2},
    };
    CHECK(iv == want);
    CHECK(seeded_intervals(16, 0.70710678118654752, 8) == iv);
    for (const auto& s : seeded_intervals(120, 0.70710678118654752, 20)) {
        CHECK(s.length() >= 20);
        CHECK(s.hi <= 120);
    }
    CHECK_THROWS_AS(seeded_intervals(16, 0.3, 8), ConfigError);
    CHECK_THROWS_AS(seeded_intervals(6, 0.7, 8), ConfigError);
}

TEST_CASE("segmentation defaults", "[segmenter]") {
    DetectorConfig cfg;
    const auto r = resolve(SegmentationConfig{}, cfg, 120);
    // max(10, ceil(2 / 0.1))
    CHECK(r.min_interval_len == 20);
    CHECK(r.min_gap == 10);
    CHECK(r.intervals == seeded_intervals(120, r.decay, 20).size());
    CHECK(r.alpha_seg == Approx(0.05 / static_cast<double>(r.intervals)));
    CHECK(static_cast<double>(r.max_perms) >= 2.0 / r.alpha_seg);
}

TEST_CASE("segmentation finds one change where the single detector does", "[segmenter]") {
    VectorSimConfig vc;
    vc.blocks = 60;
    vc.changes = {{30 * vc.period + 1, 3.0}};
    const auto blocks = blockify(generate_periodic_vector_series(vc, 17), vc.period);
    DetectorConfig cfg;
    cfg.master_seed = 5;
    const auto single = detect_single(blocks, cfg);
    const auto seg = segment_multiple(blocks, cfg);
    REQUIRE(seg.change_points.size() == 1);
    CHECK(seg.change_points[0].t_hat == single.t_hat);
    CHECK(single.t_hat == 30);
    REQUIRE(seg.change_points[0].localization);
    CHECK(seg.change_points[0].l_F_hat == seg.change_points[0].localization->location.l_F_hat);
}

TEST_CASE("segmentation on null data", "[segmenter]") {
    VectorSimConfig vc;
    vc.blocks = 60;
    int clean = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        DetectorConfig cfg;
        cfg.master_seed = seed;
        clean += segment_multiple(blockify(generate_periodic_vector_series(vc, 500 + seed), vc.period), cfg)
                         .change_points.empty()
                     ? 1
                     : 0;
    }
    CHECK(clean >= 8);
}
