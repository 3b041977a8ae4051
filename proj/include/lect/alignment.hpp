#pragma once

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lect/complex.hpp"
#include "lect/ect.hpp"
#include "lect/rotation.hpp"

namespace lect {

/// Maps every vertex v to R v; simplices are untouched.
GeometricComplex rotate(const GeometricComplex& complex, const RotationParams& rotation);
GeometricComplex rotate(const GeometricComplex& complex, const Eigen::MatrixXd& rotation);

struct AlignOptions {
    double sharpness = 100.0;
    int restarts = 8;
    int max_iters = 500;
    double initial_step = 0.05;
    double momentum = 0.9;
    double min_step = 1e-9;
    double restart_range = std::numbers::pi;
    std::uint64_t seed = 0;
    /// Center both complexes at their vertex centroids and divide by the larger radius.
    bool normalize = true;
    int jobs = 1;
};

/**
 * Squared L2 distance between the smooth ECT of a fixed complex and the
 * smooth ECT of a rotated moving complex, on a fixed grid.
 *
 * Rotating the complex by R is evaluated as scanning it along R^T v, so only
 * the m directions are rotated. The gradient is exact: it differentiates the
 * logistic relaxation, the height max (through its active vertex) and the
 * exponential map.
 */
class AlignmentObjective {
public:
    AlignmentObjective(const GeometricComplex& fixed, const GeometricComplex& moving, const SamplingGrid& grid,
                       double sharpness);

    double value(const RotationParams& params) const;
    double value_and_gradient(const RotationParams& params, Eigen::VectorXd& gradient) const;

    int ambient_dim() const { return grid_.ambient_dim(); }

private:
    double evaluate(const RotationParams& params, Eigen::VectorXd* gradient) const;

    SimplexTable moving_;
    SamplingGrid grid_;
    double sharpness_;
    Eigen::MatrixXd target_;
};

struct AlignmentResult {
    RotationParams best_rotation;
    Eigen::MatrixXd rotation;        // realized matrix of best_rotation
    std::vector<double> loss_trace;  // accepted objective values of the winning restart
    double final_loss_l2sq = 0.0;    // hard ECT, at the returned rotation
    double final_loss_linf = 0.0;
    double initial_loss_l2sq = 0.0;  // hard ECT, at the identity rotation
    double initial_loss_linf = 0.0;
    double objective = 0.0;          // smooth objective at the returned rotation
    int restarts_used = 0;
    int best_restart = 0;
    std::vector<std::string> warnings;
    Eigen::RowVectorXd center_fixed;
    Eigen::RowVectorXd center_moving;
    double scale = 1.0;

    /// Maps points of the moving frame into the fixed frame: p -> R (p - c_moving) + c_fixed.
    Points apply(const Points& moving_points) const;
};

/// Minimizes the smooth squared-L2 ECT distance over SO(n) by momentum
/// gradient descent with seeded restarts; reports hard-ECT distances.
AlignmentResult align(const GeometricComplex& fixed, const GeometricComplex& moving, const SamplingGrid& grid,
                      const AlignOptions& options = {});

/// Upper bound on the rotation-invariant distance: the hard ECT sup-norm at the best rotation found.
double dect_estimate(const GeometricComplex& x, const GeometricComplex& y, const SamplingGrid& grid,
                     const AlignOptions& options = {});

struct LocalDistance {
    double l2sq = 0.0;
    double linf = 0.0;
};

/// Aligns the normalized neighborhoods of two vertices of the same complex.
LocalDistance local_align_distance(const GeometricComplex& complex, Index x, Index y, const NeighborhoodSpec& spec,
                                   const SamplingGrid& grid, AlignOptions options = {});

/// Symmetric Hausdorff distance between two point sets (rows), exact.
double hausdorff(const Points& p, const Points& q);

}  // namespace lect
