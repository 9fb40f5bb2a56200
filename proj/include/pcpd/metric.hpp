#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pcpd {

enum class MetricId { frobenius, euclidean, precomputed };

std::string_view to_string(MetricId id);
MetricId parse_metric(std::string_view name);

double frobenius_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
double euclidean_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

struct GraphLaplacian {
    Eigen::MatrixXd entries;
    std::vector<std::string> node_labels;
};

// L = D - A. The adjacency must be symmetric, nonnegative and hollow.
GraphLaplacian build_laplacian(const Eigen::MatrixXd& adjacency);

// Inverse of build_laplacian: off-diagonal weights of a valid Laplacian.
Eigen::MatrixXd adjacency_from_laplacian(const Eigen::MatrixXd& laplacian);

bool is_symmetric(const Eigen::MatrixXd& m, double rel_tol = 1e-9);
bool is_graph_laplacian(const Eigen::MatrixXd& m, double tol = 1e-9);

/// An ordered sequence of metric-space points sharing one metric.
///
/// Matrix payloads use the Frobenius metric, vector payloads the Euclidean
/// metric, and a precomputed n x n distance matrix lets any external metric
/// be plugged in; in that mode the objects are just indices into the matrix.
class ObjectSeries {
public:
    ObjectSeries() = default;

    static ObjectSeries from_matrices(std::vector<Eigen::MatrixXd> objects,
                                      std::vector<std::string> node_labels = {});
    static ObjectSeries from_laplacians(const std::vector<GraphLaplacian>& objects);
    static ObjectSeries from_vectors(std::vector<Eigen::VectorXd> objects);
    static ObjectSeries from_distance_matrix(Eigen::MatrixXd distances);

    std::size_t size() const noexcept { return size_; }
    MetricId metric() const noexcept { return metric_; }
    // p for p x p matrices, vector length, or n for precomputed.
    std::size_t dimension() const noexcept { return dimension_; }

    double distance(std::size_t i, std::size_t j) const;

    const std::vector<Eigen::MatrixXd>& matrices() const noexcept { return matrices_; }
    const std::vector<Eigen::VectorXd>& vectors() const noexcept { return vectors_; }
    const Eigen::MatrixXd& distance_matrix() const noexcept { return distances_; }
    const std::vector<std::string>& node_labels() const noexcept { return node_labels_; }

    // Concatenation; both series must share metric and dimension.
    // Precomputed series cannot be concatenated.
    ObjectSeries concat(const ObjectSeries& tail) const;
    ObjectSeries subseries(std::size_t first, std::size_t count) const;

private:
    MetricId metric_ = MetricId::euclidean;
    std::size_t size_ = 0;
    std::size_t dimension_ = 0;
    std::vector<Eigen::MatrixXd> matrices_;
    std::vector<Eigen::VectorXd> vectors_;
    Eigen::MatrixXd distances_;
    std::vector<std::string> node_labels_;
};

} // namespace pcpd
