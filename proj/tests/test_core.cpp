#include "catch_amalgamated.hpp"

#include "naive.hpp"

#include "pcpd/blocking.hpp"
#include "pcpd/delta_tensor.hpp"
#include "pcpd/errors.hpp"
#include "pcpd/mdf.hpp"
#include "pcpd/metric.hpp"
#include "pcpd/rng.hpp"

#include <random>

using namespace pcpd;
using Catch::Approx;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (const double x : xs) {
        v(i++) = x;
    }
    return v;
}

// Scalars in block-major order: block i, coordinate m at i * M + m.
ObjectSeries scalars(std::initializer_list<double> xs) {
    std::vector<Eigen::VectorXd> out;
    for (const double x : xs) {
        out.push_back(vec({x}));
    }
    return ObjectSeries::from_vectors(std::move(out));
}

} // namespace

TEST_CASE("frobenius and euclidean distances", "[metric]") {
    Eigen::MatrixXd a(2, 2);
    a << 1, -1, -1, 1;
    CHECK(frobenius_distance(a, a) == 0.0);
    CHECK(frobenius_distance(a, Eigen::MatrixXd::Zero(2, 2)) == 2.0);
    CHECK(euclidean_distance(vec({0, 0}), vec({3, 4})) == 5.0);

    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::MatrixXd x(3, 3), y(3, 3);
        for (Eigen::Index i = 0; i < 3; ++i) {
            for (Eigen::Index j = 0; j < 3; ++j) {
                x(i, j) = g(rng);
                y(i, j) = g(rng);
            }
        }
        x = (x + x.transpose()).eval();
        y = (y + y.transpose()).eval();
        CHECK(frobenius_distance(x, y) == frobenius_distance(y, x));
        const Eigen::VectorXd p = Eigen::VectorXd::NullaryExpr(3, [&] { return g(rng); });
        const Eigen::VectorXd q = Eigen::VectorXd::NullaryExpr(3, [&] { return g(rng); });
        const Eigen::VectorXd r = Eigen::VectorXd::NullaryExpr(3, [&] { return g(rng); });
        CHECK(euclidean_distance(p, r) <= euclidean_distance(p, q) + euclidean_distance(q, r) + 1e-12);
    }
}

TEST_CASE("graph laplacian", "[metric]") {
    Eigen::MatrixXd a(2, 2);
    a << 0, 2, 2, 0;
    Eigen::MatrixXd want(2, 2);
    want << 2, -2, -2, 2;
    CHECK(build_laplacian(a).entries == want);
    CHECK(build_laplacian(Eigen::MatrixXd::Zero(3, 3)).entries == Eigen::MatrixXd::Zero(3, 3));

    Eigen::MatrixXd path = Eigen::MatrixXd::Zero(3, 3);
    path(0, 1) = path(1, 0) = path(1, 2) = path(2, 1) = 1.0;
    const auto lap = build_laplacian(path);
    CHECK(lap.entries.rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
    CHECK(is_graph_laplacian(lap.entries));
    CHECK(adjacency_from_laplacian(lap.entries) == path);

    Eigen::MatrixXd bad = path;
    bad(0, 2) = -1.0;
    CHECK_THROWS_AS(build_laplacian(bad), InputError);
}

TEST_CASE("within-period index", "[blocking]") {
    CHECK(within_period_index(1, 13) == 1);
    CHECK(within_period_index(13, 13) == 13);
    CHECK(within_period_index(14, 13) == 1);
    CHECK(within_period_index(27, 13) == 1);
    CHECK(within_period_index(26, 13) == 13);
}

TEST_CASE("blockify drop and recycle", "[blocking]") {
    std::vector<double> xs;
    for (int i = 1; i <= 27; ++i) {
        xs.push_back(i);
    }
    std::vector<Eigen::VectorXd> objs;
    for (const double x : xs) {
        objs.push_back(vec({x}));
    }
    const auto series = ObjectSeries::from_vectors(objs);

    const auto dropped = blockify(series.subseries(0, 26), 13);
    CHECK(dropped.blocks() == 2);
    const auto dropped27 = blockify(series, 13);
    CHECK(dropped27.blocks() == 2);
    // Object 27 is discarded: block 2 coordinate 1 is Y_14.
    CHECK(dropped27.distance(1, 0, 1) == 13.0);

    // n = 14, recycle: block 2 = (Y14, Y2, ..., Y13).
    const auto short14 = series.subseries(0, 14);
    const auto rec = blockify(short14, 13, RemainderPolicy::recycle);
    CHECK(rec.blocks() == 2);
    CHECK(block_source_index(14, 13, RemainderPolicy::recycle, 1, 1) == 13);
    for (std::size_t m = 2; m <= 13; ++m) {
        CHECK(block_source_index(14, 13, RemainderPolicy::recycle, 1, m) == m - 1);
        CHECK(rec.distance(m, 0, 1) == 0.0);
    }
    CHECK(rec.distance(1, 0, 1) == 13.0);
    CHECK_THROWS_AS(blockify(series.subseries(0, 14), 13), InputError);
    CHECK(parse_remainder_policy("recycle") == RemainderPolicy::recycle);
    CHECK_THROWS(parse_remainder_policy("pad"));
}

TEST_CASE("ball indicator tensor on the hand toy", "[tensor]") {
    // M = 2 on the line: Z1 = (0, 0), Z2 = (1, 2), Z3 = (3, 1).
    const auto blocks = blockify(scalars({0, 0, 1, 2, 3, 1}), 2);
    const auto t = DeltaTensor::build_joint(blocks, 1);
    CHECK(t.blocks() == 3);
    CHECK_FALSE(t(0, 1, 2));
    CHECK(t(0, 1, 0));
    CHECK(t(0, 1, 1));
    CHECK(empirical_mdf(t, 0, 1, 0, 2) == Approx(2.0 / 3.0).epsilon(0));
    CHECK(empirical_mdf(t, 0, 1, 2, 1) == 0.0);
    CHECK(empirical_mdf(t, 0, 1, 2, 2) == 0.0);
    CHECK(empirical_mdf(t, 0, 1, 1, 1) == 1.0);

    // Marginal tensors only look at their own coordinate.
    const std::size_t second[] = {2};
    const auto t2 = DeltaTensor::build(blocks, second, 1);
    CHECK(t2(0, 1, 2)); // |0 - 1| <= |0 - 2|
}

TEST_CASE("tensor diagonal terms and identical blocks", "[tensor]") {
    std::mt19937_64 rng(3);
    std::vector<Eigen::VectorXd> objs;
    for (int i = 0; i < 30; ++i) {
        objs.push_back(vec({naive::draw_value(rng, false), naive::draw_value(rng, false)}));
    }
    const auto blocks = blockify(ObjectSeries::from_vectors(objs), 3);
    const auto t = DeltaTensor::build_joint(blocks, 2);
    for (std::size_t i = 0; i < t.blocks(); ++i) {
        for (std::size_t j = 0; j < t.blocks(); ++j) {
            CHECK(t(i, j, i));
            CHECK(t(i, j, j));
        }
    }
    const auto same = blockify(scalars({1, 2, 1, 2, 1, 2, 1, 2}), 2);
    const auto ts = DeltaTensor::build_joint(same, 1);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            for (std::size_t k = 0; k < 4; ++k) {
                CHECK(ts(i, j, k));
            }
        }
    }
}

TEST_CASE("relabelled tensor matches the reordered data", "[tensor]") {
    std::mt19937_64 rng(5);
    std::vector<Eigen::VectorXd> objs;
    for (int i = 0; i < 70 * 2; ++i) {
        objs.push_back(vec({naive::draw_value(rng, true)}));
    }
    const auto series = ObjectSeries::from_vectors(objs);
    const auto t = DeltaTensor::build_joint(blockify(series, 2), 1);
    const auto perm = random_permutation(70, 9);
    std::vector<Eigen::VectorXd> moved;
    for (const auto b : perm) {
        moved.push_back(objs[2 * b]);
        moved.push_back(objs[2 * b + 1]);
    }
    const auto direct = DeltaTensor::build_joint(blockify(ObjectSeries::from_vectors(moved), 2), 1);
    const auto relabelled = t.relabel(perm);
    bool same = true;
    for (std::size_t i = 0; i < 70; ++i) {
        for (std::size_t j = 0; j < 70; ++j) {
            for (std::size_t k = 0; k < 70; ++k) {
                same = same && relabelled(i, j, k) == direct(i, j, k);
            }
        }
    }
    CHECK(same);
}

TEST_CASE("thread count does not change the tensor", "[tensor]") {
    std::mt19937_64 rng(6);
    std::vector<Eigen::VectorXd> objs;
    for (int i = 0; i < 90; ++i) {
        objs.push_back(vec({naive::draw_value(rng, false), naive::draw_value(rng, true)}));
    }
    const auto blocks = blockify(ObjectSeries::from_vectors(objs), 3);
    const auto a = DeltaTensor::build_joint(blocks, 1);
    const auto b = DeltaTensor::build_joint(blocks, 3);
    CHECK(a.memory_bytes() == b.memory_bytes());
    bool same = true;
    for (std::size_t i = 0; i < a.blocks(); ++i) {
        for (std::size_t k = 0; k < a.blocks(); ++k) {
            for (std::size_t w = 0; w < a.words_per_row(); ++w) {
                same = same && a.slab(i, k)[w] == b.slab(i, k)[w];
            }
        }
    }
    CHECK(same);
}

TEST_CASE("candidate splits", "[scan]") {
    const auto r = candidate_splits(50, 0.1);
    CHECK(r.first == 5);
    CHECK(r.last == 45);
    // 0.1 * 30 is 3.0000000000000004 in binary; still 3.
    CHECK(candidate_splits(30, 0.1).first == 3);
    CHECK(candidate_splits(30, 0.1).last == 27);
    CHECK(candidate_splits(4, 0.1).first == 1);
    CHECK(candidate_splits(4, 0.1).last == 3);
}

TEST_CASE("scan statistic against the definition", "[scan]") {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 25; ++rep) {
        // K = 6, M = 2
        std::vector<Eigen::VectorXd> objs;
        for (int i = 0; i < 12; ++i) {
            objs.push_back(vec({naive::draw_value(rng, rep % 2 == 0), naive::draw_value(rng, false)}));
        }
        const auto series = ObjectSeries::from_vectors(objs);
        const auto d = naive::block_distances(6, 2, [&](std::size_t a, std::size_t b) {
            return naive::euclid(objs[a], objs[b]);
        });
        const auto ones = Eigen::MatrixXd::Ones(6, 6);
        const auto t = DeltaTensor::build_joint(blockify(series, 2), 1);
        const auto curve = scan_statistic_curve(t, WeightSpec{}, 0.1);
        REQUIRE(curve.size() == 5);
        for (const auto& pt : curve) {
            CHECK(std::abs(pt.value - naive::scan(d, ones, pt.t)) <= 1e-12);
            CHECK(pt.u == static_cast<double>(pt.t) / 6.0);
            CHECK(pt.value >= 0.0);
            CHECK(pt.value <= 0.5);
        }
    }
}

TEST_CASE("scan prefactor at K=4, t=2", "[scan]") {
    // Blocks a a b b on the line; at t = 2 each F difference is 1/2 or 1.
    const auto blocks = blockify(scalars({0, 0, 10, 10}), 1);
    const auto t = DeltaTensor::build_joint(blocks, 1);
    const auto curve = scan_statistic_curve(t, WeightSpec{}, 0.1);
    const auto d = naive::block_distances(4, 1, [](std::size_t a, std::size_t b) {
        const double x[] = {0, 0, 10, 10};
        return std::abs(x[a] - x[b]);
    });
    const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(4, 4);
    // Pairs inside each half all have F1 - F2 = +-1, so the bracket is 1 + 1.
    CHECK(naive::scan(d, ones, 2) == 0.25 * 2.0);
    CHECK(curve[1].t == 2);
    CHECK(curve[1].value == 0.5);
}

TEST_CASE("identical blocks give a zero curve", "[scan]") {
    const auto blocks = blockify(scalars({1, 5, 1, 5, 1, 5, 1, 5, 1, 5, 1, 5}), 2);
    const auto t = DeltaTensor::build_joint(blocks, 1);
    for (const auto& pt : scan_statistic_curve(t, WeightSpec{}, 0.1)) {
        CHECK(pt.value == 0.0);
    }
}

TEST_CASE("scan ties resolve to the smallest split", "[scan]") {
    // Symmetric data: splits 2 and 4 of 0 0 1 1 0 0 share one value.
    const auto blocks = blockify(scalars({0, 0, 1, 1, 0, 0}), 1);
    const auto t = DeltaTensor::build_joint(blocks, 1);
    ScanStatistic scan(t, WeightSpec{}, 0.1);
    ScanStatistic::Workspace ws;
    const auto curve = scan.curve({}, ws);
    const auto best = scan.maximize({}, ws);
    double top = 0.0;
    for (const auto& pt : curve) {
        top = std::max(top, pt.value);
    }
    std::size_t first_top = 0;
    for (const auto& pt : curve) {
        if (pt.value == top) {
            first_top = pt.t;
            break;
        }
    }
    CHECK(best.value == top);
    CHECK(best.t == first_top);
}

TEST_CASE("weighted scan matches the definition", "[scan]") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    std::vector<Eigen::VectorXd> objs;
    for (int i = 0; i < 7 * 3; ++i) {
        objs.push_back(vec({naive::draw_value(rng, true), naive::draw_value(rng, true)}));
    }
    Eigen::MatrixXd w(7, 7);
    for (Eigen::Index i = 0; i < 7; ++i) {
        for (Eigen::Index j = 0; j < 7; ++j) {
            w(i, j) = u(rng);
        }
    }
    const auto d = naive::block_distances(7, 3, [&](std::size_t a, std::size_t b) {
        return naive::euclid(objs[a], objs[b]);
    });
    const auto t = DeltaTensor::build_joint(blockify(ObjectSeries::from_vectors(objs), 3), 1);
    for (const auto& pt : scan_statistic_curve(t, WeightSpec::from_matrix(w, 3.0), 0.1)) {
        CHECK(std::abs(pt.value - naive::scan(d, w, pt.t)) <= 1e-12);
    }
    CHECK_THROWS_AS(WeightSpec::from_matrix(w, 1.0), InputError);
    CHECK_THROWS_AS(WeightSpec::from_matrix(-w, 3.0), InputError);
}

TEST_CASE("two-sample MCVM", "[mcvm]") {
    const auto s1 = scalars({0.0, 0.1});
    const auto s2 = scalars({10.0, 10.1});
    // Sample 1 pairs: (0,0) and (0.1,0.1) have F1 - F2 = 1/2, the two mixed
    // pairs have 1, so 2.5 / 4. Sample 2 mirrors it.
    CHECK(mcvm_two_sample(s1, s2) == 1.25);
    CHECK(mcvm_two_sample(s2, s1) == 1.25);
    CHECK(mcvm_two_sample(s1, s1) == 0.0);
    CHECK(mcvm_two_sample(scalars({1, 2, 2}), scalars({2, 1, 2})) == 0.0);
    CHECK_THROWS_AS(mcvm_two_sample(s1, ObjectSeries::from_vectors({})), InputError);

    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<Eigen::VectorXd> a, b;
        for (int i = 0; i < 4; ++i) {
            a.push_back(vec({naive::draw_value(rng, rep % 2 == 0)}));
        }
        for (int i = 0; i < 5; ++i) {
            b.push_back(vec({naive::draw_value(rng, rep % 2 == 0)}));
        }
        const auto x = ObjectSeries::from_vectors(a);
        const auto y = ObjectSeries::from_vectors(b);
        CHECK(std::abs(mcvm_two_sample(x, y) - mcvm_two_sample(y, x)) <= 1e-15);
    }
}

TEST_CASE("marginal statistic", "[mcvm]") {
    std::mt19937_64 rng(10);
    std::vector<Eigen::VectorXd> objs;
    for (int i = 0; i < 6 * 2; ++i) {
        objs.push_back(vec({naive::draw_value(rng, false)}));
    }
    const auto series = ObjectSeries::from_vectors(objs);
    const auto blocks = blockify(series, 2);
    const auto d = naive::block_distances(6, 2, [&](std::size_t a, std::size_t b) {
        return naive::euclid(objs[a], objs[b]);
    });
    const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(6, 6);
    for (std::size_t t = 1; t <= 4; ++t) {
        for (std::size_t m = 1; m <= 2; ++m) {
            CHECK(std::abs(marginal_statistic(blocks, m, t) - naive::marginal(d, ones, m - 1, t)) <= 1e-12);
        }
    }

    // Perturbing coordinate 2 leaves coordinate 1 untouched.
    auto changed = objs;
    for (std::size_t i = 1; i < changed.size(); i += 2) {
        changed[i](0) += 100.0 * static_cast<double>(i);
    }
    const auto blocks2 = blockify(ObjectSeries::from_vectors(changed), 2);
    CHECK(marginal_statistic(blocks2, 1, 2) == marginal_statistic(blocks, 1, 2));

    const auto flat = blockify(scalars({3, 1, 3, 2, 3, 7, 3, 4, 3, 5}), 2);
    CHECK(marginal_statistic(flat, 1, 2) == 0.0);
    CHECK_THROWS_AS(marginal_statistic(blocks, 1, 5), InputError);
    CHECK_THROWS_AS(marginal_statistic(blocks, 3, 2), InputError);
    CHECK(retained_blocks(5, 2) == std::vector<std::size_t>{0, 1, 3, 4});
}

TEST_CASE("object series", "[metric]") {
    const auto a = scalars({1, 2, 3});
    const auto b = scalars({4});
    const auto c = a.concat(b);
    CHECK(c.size() == 4);
    CHECK(c.distance(0, 3) == 3.0);
    CHECK(c.subseries(1, 2).distance(0, 1) == 1.0);
    Eigen::MatrixXd d(2, 2);
    d << 0, 1, 1, 0;
    const auto pre = ObjectSeries::from_distance_matrix(d);
    CHECK(pre.metric() == MetricId::precomputed);
    CHECK(pre.distance(0, 1) == 1.0);
    Eigen::MatrixXd bad(2, 2);
    bad << 0, 1, 2, 0;
    CHECK_THROWS_AS(ObjectSeries::from_distance_matrix(bad), InputError);
    CHECK_THROWS_AS(a.concat(ObjectSeries::from_vectors({vec({1, 2})})), InputError);
}
