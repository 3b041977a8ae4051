#pragma once

#include <random>

#include <Eigen/Dense>

namespace lect {

/**
 * Rotation in SO(n) written as exp(A) for a skew-symmetric A.
 *
 * The n(n-1)/2 parameters fill the strictly lower triangle row by row:
 * parameter p for the pair (a, b), a < b, sets A(b, a) = theta_p and
 * A(a, b) = -theta_p. For n = 2 the single parameter is the
 * counter-clockwise angle.
 */
struct RotationParams {
    int n = 0;
    Eigen::VectorXd skew;

    static RotationParams identity(int n);
    static RotationParams from_angle(double radians);
    /// Entries uniform in [-range, range].
    static RotationParams random(int n, std::mt19937_64& rng, double range);

    static int parameter_count(int n) { return n * (n - 1) / 2; }

    Eigen::MatrixXd generator() const;
    Eigen::MatrixXd matrix() const;
    RotationParams inverse() const;
};

/// Scaling-and-squaring Padé exponential.
Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& a);

/// Adjoint of the Fréchet derivative of exp at A applied to G:
/// returns M with <G, D exp(A)[E]> = <M, E> for every E.
Eigen::MatrixXd exp_derivative_adjoint(const Eigen::MatrixXd& a, const Eigen::MatrixXd& g);

/// Gradient of f(exp(A(theta))) w.r.t. theta given G = df/dR.
Eigen::VectorXd rotation_gradient(const RotationParams& params, const Eigen::MatrixXd& g);

/// max |R^T R - I| entry.
double orthogonality_error(const Eigen::MatrixXd& r);

}  // namespace lect
