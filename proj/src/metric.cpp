#include "pcpd/metric.hpp"

#include "pcpd/errors.hpp"

#include <cmath>
#include <string>

namespace pcpd {

std::string_view to_string(MetricId id) {
    switch (id) {
    case MetricId::frobenius:
        return "frobenius";
    case MetricId::euclidean:
        return "euclidean";
    case MetricId::precomputed:
        return "precomputed";
    }
    return "unknown";
}

MetricId parse_metric(std::string_view name) {
    if (name == "frobenius") {
        return MetricId::frobenius;
    }
    if (name == "euclidean") {
        return MetricId::euclidean;
    }
    if (name == "precomputed") {
        return MetricId::precomputed;
    }
    throw InputError("unknown metric '" + std::string(name) + "'");
}

double frobenius_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw InputError("frobenius_distance: dimension mismatch");
    }
    return (a - b).norm();
}

double euclidean_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    if (x.size() != y.size()) {
        throw InputError("euclidean_distance: length mismatch");
    }
    return (x - y).norm();
}

bool is_symmetric(const Eigen::MatrixXd& m, double rel_tol) {
    if (m.rows() != m.cols()) {
        return false;
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return ((m - m.transpose()).cwiseAbs().maxCoeff()) <= rel_tol * scale;
}

bool is_graph_laplacian(const Eigen::MatrixXd& m, double tol) {
    if (m.rows() != m.cols() || !is_symmetric(m, tol)) {
        return false;
    }
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (std::abs(m.row(i).sum()) > tol || m(i, i) < 0.0) {
            return false;
        }
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (i != j && m(i, j) > 0.0) {
                return false;
            }
        }
    }
    return true;
}

GraphLaplacian build_laplacian(const Eigen::MatrixXd& adjacency) {
    if (adjacency.rows() != adjacency.cols()) {
        throw InputError("build_laplacian: adjacency must be square");
    }
    if (!is_symmetric(adjacency)) {
        throw InputError("build_laplacian: adjacency must be symmetric");
    }
    if (adjacency.size() > 0 && adjacency.minCoeff() < 0.0) {
        throw InputError("build_laplacian: negative edge weight");
    }
    if (adjacency.size() > 0 && adjacency.diagonal().cwiseAbs().maxCoeff() != 0.0) {
        throw InputError("build_laplacian: adjacency diagonal must be zero");
    }
    // Symmetrize exactly so the Laplacian is bitwise symmetric.
    const Eigen::MatrixXd a = 0.5 * (adjacency + adjacency.transpose());
    GraphLaplacian out;
    out.entries = -a;
    out.entries.diagonal() = a.rowwise().sum();
    return out;
}

Eigen::MatrixXd adjacency_from_laplacian(const Eigen::MatrixXd& laplacian) {
    Eigen::MatrixXd a = -laplacian;
    a.diagonal().setZero();
    return a;
}

ObjectSeries ObjectSeries::from_matrices(std::vector<Eigen::MatrixXd> objects,
                                         std::vector<std::string> node_labels) {
    ObjectSeries s;
    s.metric_ = MetricId::frobenius;
    s.size_ = objects.size();
    if (!objects.empty()) {
        s.dimension_ = static_cast<std::size_t>(objects.front().rows());
    }
    for (std::size_t i = 0; i < objects.size(); ++i) {
        const auto& m = objects[i];
        if (static_cast<std::size_t>(m.rows()) != s.dimension_ ||
            static_cast<std::size_t>(m.cols()) != s.dimension_) {
            throw InputError("object " + std::to_string(i) + ": expected a " +
                             std::to_string(s.dimension_) + "x" + std::to_string(s.dimension_) +
                             " matrix");
        }
        if (!is_symmetric(m)) {
            throw InputError("object " + std::to_string(i) + ": matrix is not symmetric");
        }
    }
    if (!node_labels.empty() && node_labels.size() != s.dimension_) {
        throw InputError("node label count does not match matrix dimension");
    }
    s.matrices_ = std::move(objects);
    s.node_labels_ = std::move(node_labels);
    return s;
}

ObjectSeries ObjectSeries::from_laplacians(const std::vector<GraphLaplacian>& objects) {
    std::vector<Eigen::MatrixXd> mats;
    mats.reserve(objects.size());
    for (const auto& l : objects) {
        mats.push_back(l.entries);
    }
    std::vector<std::string> labels;
    if (!objects.empty()) {
        labels = objects.front().node_labels;
    }
    return from_matrices(std::move(mats), std::move(labels));
}

ObjectSeries ObjectSeries::from_vectors(std::vector<Eigen::VectorXd> objects) {
    ObjectSeries s;
    s.metric_ = MetricId::euclidean;
    s.size_ = objects.size();
    if (!objects.empty()) {
        s.dimension_ = static_cast<std::size_t>(objects.front().size());
    }
    for (std::size_t i = 0; i < objects.size(); ++i) {
        if (static_cast<std::size_t>(objects[i].size()) != s.dimension_) {
            throw InputError("object " + std::to_string(i) + ": vector length mismatch");
        }
    }
    s.vectors_ = std::move(objects);
    return s;
}

ObjectSeries ObjectSeries::from_distance_matrix(Eigen::MatrixXd distances) {
    if (distances.rows() != distances.cols()) {
        throw InputError("precomputed distances must be a square matrix");
    }
    if (!is_symmetric(distances)) {
        throw InputError("precomputed distances must be symmetric");
    }
    if (distances.size() > 0 &&
        (distances.minCoeff() < 0.0 || distances.diagonal().cwiseAbs().maxCoeff() != 0.0)) {
        throw InputError("precomputed distances must be nonnegative with a zero diagonal");
    }
    ObjectSeries s;
    s.metric_ = MetricId::precomputed;
    s.size_ = static_cast<std::size_t>(distances.rows());
    s.dimension_ = s.size_;
    s.distances_ = 0.5 * (distances + distances.transpose());
    return s;
}

double ObjectSeries::distance(std::size_t i, std::size_t j) const {
    if (i >= size_ || j >= size_) {
        throw InputError("object index out of range");
    }
    switch (metric_) {
    case MetricId::frobenius:
        return (matrices_[i] - matrices_[j]).norm();
    case MetricId::euclidean:
        return (vectors_[i] - vectors_[j]).norm();
    case MetricId::precomputed:
        return distances_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    return 0.0;
}

ObjectSeries ObjectSeries::concat(const ObjectSeries& tail) const {
    if (size_ == 0) {
        return tail;
    }
    if (tail.size_ == 0) {
        return *this;
    }
    if (metric_ != tail.metric_ || dimension_ != tail.dimension_) {
        throw InputError("concat: series differ in metric or dimension");
    }
    switch (metric_) {
    case MetricId::frobenius: {
        auto mats = matrices_;
        mats.insert(mats.end(), tail.matrices_.begin(), tail.matrices_.end());
        return from_matrices(std::move(mats), node_labels_);
    }
    case MetricId::euclidean: {
        auto vecs = vectors_;
        vecs.insert(vecs.end(), tail.vectors_.begin(), tail.vectors_.end());
        return from_vectors(std::move(vecs));
    }
    case MetricId::precomputed:
        break;
    }
    throw InputError("concat: precomputed-distance series cannot be concatenated");
}

ObjectSeries ObjectSeries::subseries(std::size_t first, std::size_t count) const {
    if (first + count > size_) {
        throw InputError("subseries: range out of bounds");
    }
    const auto b = static_cast<std::ptrdiff_t>(first);
    const auto e = static_cast<std::ptrdiff_t>(first + count);
    switch (metric_) {
    case MetricId::frobenius:
        return from_matrices({matrices_.begin() + b, matrices_.begin() + e}, node_labels_);
    case MetricId::euclidean:
        return from_vectors({vectors_.begin() + b, vectors_.begin() + e});
    case MetricId::precomputed:
        return from_distance_matrix(distances_.block(b, b, e - b, e - b));
    }
    return {};
}

} // namespace pcpd
