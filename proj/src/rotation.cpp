#include "lect/rotation.hpp"

#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace lect {

RotationParams RotationParams::identity(int n)
{
    if (n < 1) throw std::invalid_argument("rotation dimension must be positive");
    return RotationParams{n, Eigen::VectorXd::Zero(parameter_count(n))};
}

RotationParams RotationParams::from_angle(double radians)
{
    RotationParams p = identity(2);
    p.skew(0) = radians;
    return p;
}

RotationParams RotationParams::random(int n, std::mt19937_64& rng, double range)
{
    RotationParams p = identity(n);
    std::uniform_real_distribution<double> uniform(-range, range);
    for (Eigen::Index i = 0; i < p.skew.size(); ++i) p.skew(i) = uniform(rng);
    return p;
}

Eigen::MatrixXd RotationParams::generator() const
{
    if (skew.size() != parameter_count(n)) throw std::invalid_argument("rotation parameter count mismatch");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    Eigen::Index p = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j, ++p) {
            a(j, i) = skew(p);
            a(i, j) = -skew(p);
        }
    }
    return a;
}

Eigen::MatrixXd RotationParams::matrix() const
{
    return matrix_exp(generator());
}

RotationParams RotationParams::inverse() const
{
    return RotationParams{n, -skew};
}

Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& a)
{
    if (a.rows() != a.cols()) throw std::invalid_argument("matrix_exp needs a square matrix");
    return a.exp();
}

Eigen::MatrixXd exp_derivative_adjoint(const Eigen::MatrixXd& a, const Eigen::MatrixXd& g)
{
    // D exp(B)[E] is the upper-right block of exp([[B, E], [0, B]]), and the
    // adjoint of D exp(A) is D exp(A^T).
    const Eigen::Index n = a.rows();
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    block.topLeftCorner(n, n) = a.transpose();
    block.bottomRightCorner(n, n) = a.transpose();
    block.topRightCorner(n, n) = g;
    return matrix_exp(block).topRightCorner(n, n);
}

Eigen::VectorXd rotation_gradient(const RotationParams& params, const Eigen::MatrixXd& g)
{
    const Eigen::MatrixXd m = exp_derivative_adjoint(params.generator(), g);
    Eigen::VectorXd grad(params.skew.size());
    Eigen::Index p = 0;
    for (int i = 0; i < params.n; ++i) {
        for (int j = i + 1; j < params.n; ++j, ++p) grad(p) = m(j, i) - m(i, j);
    }
    return grad;
}

double orthogonality_error(const Eigen::MatrixXd& r)
{
    return (r.transpose() * r - Eigen::MatrixXd::Identity(r.rows(), r.cols())).cwiseAbs().maxCoeff();
}

}  // namespace lect
