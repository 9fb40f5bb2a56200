#include "pcpd/mdf.hpp"

#include "pcpd/errors.hpp"
#include "pcpd/io.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <string>

namespace pcpd {

WeightSpec WeightSpec::from_matrix(Eigen::MatrixXd weights, double bound) {
    if (!(bound > 0.0) || !std::isfinite(bound)) {
        throw InputError("weight bound must be positive and finite");
    }
    if (weights.rows() != weights.cols()) {
        throw InputError("weight matrix must be square");
    }
    if (weights.size() > 0 && (weights.minCoeff() < 0.0 || weights.maxCoeff() > bound)) {
        throw InputError("weights must lie in [0, bound]");
    }
    WeightSpec w;
    w.values_ = std::move(weights);
    w.bound_ = bound;
    return w;
}

WeightSpec WeightSpec::from_callback(std::size_t count,
                                     const std::function<double(std::size_t, std::size_t)>& fn,
                                     double bound) {
    Eigen::MatrixXd w(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(count));
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < count; ++j) {
            w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = fn(i, j);
        }
    }
    return from_matrix(std::move(w), bound);
}

WeightSpec WeightSpec::restricted(std::span<const std::size_t> indices) const {
    if (is_unit()) {
        return {};
    }
    const auto n = static_cast<Eigen::Index>(indices.size());
    Eigen::MatrixXd w(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            w(i, j) = (*this)(indices[static_cast<std::size_t>(i)], indices[static_cast<std::size_t>(j)]);
        }
    }
    WeightSpec out;
    out.values_ = std::move(w);
    out.bound_ = bound_;
    return out;
}

double empirical_mdf(const DeltaTensor& tensor, std::size_t i, std::size_t j, std::ptrdiff_t first,
                     std::ptrdiff_t last) {
    const auto k = static_cast<std::ptrdiff_t>(tensor.blocks());
    if (i >= tensor.blocks() || j >= tensor.blocks()) {
        throw InputError("empirical_mdf: block index out of range");
    }
    if (first > last) {
        return 0.0;
    }
    if (first < 0 || last >= k) {
        throw InputError("empirical_mdf: range out of bounds");
    }
    std::size_t count = 0;
    for (auto x = first; x <= last; ++x) {
        count += tensor(i, j, static_cast<std::size_t>(x)) ? 1 : 0;
    }
    return static_cast<double>(count) / static_cast<double>(last - first + 1);
}

CandidateRange candidate_splits(std::size_t blocks, double b) {
    if (!(b > 0.0 && b < 0.5)) {
        throw ConfigError("boundary fraction b must lie in (0, 1/2)");
    }
    const double k = static_cast<double>(blocks);
    // The tolerance keeps products like 0.1 * 50 from rounding across an integer.
    const auto lo = static_cast<std::size_t>(std::max(1.0, std::ceil(b * k - 1e-9)));
    const auto hi_f = std::floor((1.0 - b) * k + 1e-9);
    CandidateRange r;
    r.first = lo;
    r.last = hi_f < 1.0 ? 0 : std::min<std::size_t>(blocks - 1, static_cast<std::size_t>(hi_f));
    return r;
}

ScanStatistic::ScanStatistic(const DeltaTensor& tensor, WeightSpec weights, double b,
                             std::vector<std::size_t> blocks)
    : tensor_(&tensor), weights_(std::move(weights)), blocks_(std::move(blocks)) {
    if (blocks_.empty()) {
        blocks_.resize(tensor.blocks());
        std::iota(blocks_.begin(), blocks_.end(), std::size_t{0});
    }
    for (const auto a : blocks_) {
        if (a >= tensor.blocks()) {
            throw InputError("scan: block index out of range");
        }
    }
    if (blocks_.size() < 2) {
        throw ConfigError("scan: need at least two blocks");
    }
    if (!weights_.is_unit() && weights_.size() != tensor.blocks()) {
        throw InputError("scan: weight matrix must be K x K");
    }
    range_ = candidate_splits(blocks_.size(), b);
    if (range_.empty()) {
        throw ConfigError("scan: empty candidate split set for K=" + std::to_string(blocks_.size()) +
                          " and b=" + std::to_string(b));
    }
    const std::size_t k = blocks_.size();
    row_counts_.assign(k * k, 0);
    for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t s = 0; s < k; ++s) {
            const std::uint64_t* row = tensor.slab(blocks_[p], blocks_[s]);
            std::uint32_t* r = row_counts_.data() + p * k;
            for (std::size_t q = 0; q < k; ++q) {
                const std::size_t j = blocks_[q];
                r[q] += static_cast<std::uint32_t>((row[j >> 6] >> (j & 63)) & 1U);
            }
        }
    }
}

template <class Sink>
void ScanStatistic::run(std::span<const std::size_t> order, Workspace& ws, Sink&& sink) const {
    const std::size_t k = blocks_.size();
    if (!order.empty() && order.size() != k) {
        throw InputError("scan: ordering has the wrong length");
    }
    auto position = [&](std::size_t i) { return order.empty() ? i : order[i]; };

    ws.labels.resize(k);
    ws.word.resize(k);
    ws.shift.resize(k);
    ws.rows.resize(k * k);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t a = blocks_[position(i)];
        ws.labels[i] = a;
        ws.word[i] = static_cast<std::uint32_t>(a >> 6);
        ws.shift[i] = static_cast<std::uint32_t>(a & 63);
    }
    for (std::size_t i = 0; i < k; ++i) {
        const std::uint32_t* src = row_counts_.data() + position(i) * k;
        std::uint32_t* dst = ws.rows.data() + i * k;
        for (std::size_t j = 0; j < k; ++j) {
            dst[j] = src[position(j)];
        }
    }
    const bool unit = weights_.is_unit();
    if (!unit) {
        ws.weights.resize(k * k);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                ws.weights[i * k + j] = weights_(ws.labels[i], ws.labels[j]);
            }
        }
    }
    ws.prefix.assign(k * k, 0);

    const double kk = static_cast<double>(k) * static_cast<double>(k);
    for (std::size_t t = 1; t <= range_.last; ++t) {
        const std::size_t c = ws.labels[t - 1];
        for (std::size_t i = 0; i < k; ++i) {
            const std::uint64_t* row = tensor_->slab(ws.labels[i], c);
            std::uint32_t* s = ws.prefix.data() + i * k;
            for (std::size_t j = 0; j < k; ++j) {
                s[j] += static_cast<std::uint32_t>((row[ws.word[j]] >> ws.shift[j]) & 1U);
            }
        }
        if (t < range_.first) {
            continue;
        }
        const auto n1 = static_cast<std::int64_t>(t);
        const auto n2 = static_cast<std::int64_t>(k - t);
        double sum1 = 0.0;
        double sum2 = 0.0;
        auto block_sum = [&](std::size_t lo, std::size_t hi) -> double {
            if (unit) {
                std::int64_t acc = 0;
                for (std::size_t i = lo; i < hi; ++i) {
                    const std::uint32_t* s = ws.prefix.data() + i * k;
                    const std::uint32_t* r = ws.rows.data() + i * k;
                    for (std::size_t j = lo; j < hi; ++j) {
                        const std::int64_t si = s[j];
                        const std::int64_t q = si * n2 - (static_cast<std::int64_t>(r[j]) - si) * n1;
                        acc += q * q;
                    }
                }
                return static_cast<double>(acc);
            }
            double acc = 0.0;
            for (std::size_t i = lo; i < hi; ++i) {
                const std::uint32_t* s = ws.prefix.data() + i * k;
                const std::uint32_t* r = ws.rows.data() + i * k;
                const double* w = ws.weights.data() + i * k;
                for (std::size_t j = lo; j < hi; ++j) {
                    const std::int64_t si = s[j];
                    const auto q = static_cast<double>(si * n2 - (static_cast<std::int64_t>(r[j]) - si) * n1);
                    acc += w[j] * q * q;
                }
            }
            return acc;
        };
        sum1 = block_sum(0, t);
        sum2 = block_sum(t, k);
        const double d1 = static_cast<double>(n1);
        const double d2 = static_cast<double>(n2);
        const double value = (sum1 / (d1 * d1 * d1 * d2) + sum2 / (d1 * d2 * d2 * d2)) / kk;
        sink(t, value);
    }
}

ScanMaximum ScanStatistic::maximize(std::span<const std::size_t> order, Workspace& ws) const {
    ScanMaximum best;
    bool first = true;
    run(order, ws, [&](std::size_t t, double v) {
        if (first || v > best.value) {
            best = {t, v};
            first = false;
        }
    });
    return best;
}

std::vector<ScanPoint> ScanStatistic::curve(std::span<const std::size_t> order, Workspace& ws) const {
    std::vector<ScanPoint> out;
    out.reserve(range_.size());
    const double k = static_cast<double>(blocks_.size());
    run(order, ws, [&](std::size_t t, double v) { out.push_back({t, static_cast<double>(t) / k, v}); });
    return out;
}

std::vector<ScanPoint> scan_statistic_curve(const DeltaTensor& tensor, const WeightSpec& weights, double b) {
    if (tensor.blocks() < 2) {
        throw ConfigError("scan: need at least two blocks");
    }
    ScanStatistic scan(tensor, weights, b);
    ScanStatistic::Workspace ws;
    return scan.curve({}, ws);
}

void write_scan_curve_csv(std::ostream& out, std::span<const ScanPoint> curve) {
    out << "t,u,B_hat\n";
    for (const auto& p : curve) {
        out << p.t << ',' << format_double(p.u) << ',' << format_double(p.value) << '\n';
    }
}

TwoSampleMdf::TwoSampleMdf(const Eigen::MatrixXd& distances, WeightSpec weights)
    : n_(static_cast<std::size_t>(distances.rows())), weights_(std::move(weights)) {
    if (distances.rows() != distances.cols()) {
        throw InputError("two-sample statistic: distance matrix must be square");
    }
    if (!weights_.is_unit() && weights_.size() != n_) {
        throw InputError("two-sample statistic: weight matrix size mismatch");
    }
    sorted_.resize(n_ * n_);
    in_ball_.resize(n_ * n_);
    std::vector<double> dist(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t x = 0; x < n_; ++x) {
            dist[x] = distances(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(x));
        }
        auto* order = sorted_.data() + i * n_;
        std::iota(order, order + n_, std::uint32_t{0});
        std::stable_sort(order, order + n_, [&](std::uint32_t a, std::uint32_t b) { return dist[a] < dist[b]; });
        std::vector<double> sorted_dist(n_);
        for (std::size_t r = 0; r < n_; ++r) {
            sorted_dist[r] = dist[order[r]];
        }
        for (std::size_t j = 0; j < n_; ++j) {
            const auto it = std::upper_bound(sorted_dist.begin(), sorted_dist.end(), dist[j]);
            in_ball_[i * n_ + j] = static_cast<std::uint32_t>(it - sorted_dist.begin());
        }
    }
}

double TwoSampleMdf::evaluate(std::span<const std::uint8_t> in_first, Workspace& ws) const {
    if (in_first.size() != n_) {
        throw InputError("two-sample statistic: label vector has the wrong length");
    }
    std::int64_t n1 = 0;
    for (const auto f : in_first) {
        n1 += f != 0 ? 1 : 0;
    }
    const std::int64_t n2 = static_cast<std::int64_t>(n_) - n1;
    if (n1 == 0 || n2 == 0) {
        throw InputError("two-sample statistic: both samples must be nonempty");
    }
    const bool unit = weights_.is_unit();
    std::int64_t exact[2] = {0, 0};
    double weighted[2] = {0.0, 0.0};
    ws.prefix.resize(n_ + 1);
    for (std::size_t i = 0; i < n_; ++i) {
        const auto* order = sorted_.data() + i * n_;
        ws.prefix[0] = 0;
        for (std::size_t r = 0; r < n_; ++r) {
            ws.prefix[r + 1] = ws.prefix[r] + (in_first[order[r]] != 0 ? 1U : 0U);
        }
        const bool first_i = in_first[i] != 0;
        const int side = first_i ? 0 : 1;
        for (std::size_t j = 0; j < n_; ++j) {
            if ((in_first[j] != 0) != first_i) {
                continue;
            }
            const std::int64_t c = in_ball_[i * n_ + j];
            const std::int64_t c1 = ws.prefix[static_cast<std::size_t>(c)];
            const std::int64_t q = c1 * n2 - (c - c1) * n1;
            if (unit) {
                exact[side] += q * q;
            } else {
                weighted[side] += weights_(i, j) * static_cast<double>(q) * static_cast<double>(q);
            }
        }
    }
    const double s1 = unit ? static_cast<double>(exact[0]) : weighted[0];
    const double s2 = unit ? static_cast<double>(exact[1]) : weighted[1];
    const double d1 = static_cast<double>(n1);
    const double d2 = static_cast<double>(n2);
    const double scale = d1 * d1 * d2 * d2;
    return s1 / (d1 * d1 * scale) + s2 / (d2 * d2 * scale);
}

namespace {

Eigen::MatrixXd pooled_distances(const ObjectSeries& pooled) {
    const auto n = static_cast<Eigen::Index>(pooled.size());
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = pooled.distance(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return d;
}

} // namespace

double mcvm_two_sample(const ObjectSeries& first, const ObjectSeries& second, const WeightSpec& weights) {
    if (first.size() == 0 || second.size() == 0) {
        throw InputError("mcvm_two_sample: both samples must be nonempty");
    }
    const ObjectSeries pooled = first.concat(second);
    TwoSampleMdf stat(pooled_distances(pooled), weights);
    std::vector<std::uint8_t> labels(pooled.size(), 0);
    std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(first.size()), std::uint8_t{1});
    return stat.evaluate(labels);
}

std::vector<std::size_t> retained_blocks(std::size_t blocks, std::size_t t_hat) {
    std::vector<std::size_t> out;
    out.reserve(blocks - 1);
    for (std::size_t i = 0; i < blocks; ++i) {
        if (i != t_hat) {
            out.push_back(i);
        }
    }
    return out;
}

double marginal_statistic(const BlockSeries& blocks, std::size_t m, std::size_t t_hat, const WeightSpec& weights) {
    const std::size_t k = blocks.blocks();
    if (m < 1 || m > blocks.period()) {
        throw InputError("marginal_statistic: coordinate out of range");
    }
    if (t_hat < 1 || t_hat + 2 > k) {
        throw InputError("marginal_statistic: need 1 <= t_hat <= K-2");
    }
    const auto keep = retained_blocks(k, t_hat);
    const auto& d = blocks.coordinate_distances(m);
    const auto n = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXd sub(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            sub(i, j) = d(static_cast<Eigen::Index>(keep[static_cast<std::size_t>(i)]),
                          static_cast<Eigen::Index>(keep[static_cast<std::size_t>(j)]));
        }
    }
    TwoSampleMdf stat(sub, weights.restricted(keep));
    std::vector<std::uint8_t> labels(keep.size(), 0);
    std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(t_hat), std::uint8_t{1});
    const double kd = static_cast<double>(k);
    const double prefactor = static_cast<double>(t_hat) * static_cast<double>(k - t_hat - 1) / (kd * kd);
    return prefactor * stat.evaluate(labels);
}

} // namespace pcpd
