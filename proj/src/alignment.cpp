#include "lect/alignment.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lect/parallel.hpp"

namespace lect {

GeometricComplex rotate(const GeometricComplex& complex, const Eigen::MatrixXd& rotation)
{
    if (rotation.rows() != complex.ambient_dim() || rotation.cols() != complex.ambient_dim()) {
        throw std::invalid_argument("rotation dimension does not match the complex");
    }
    return complex.with_vertices(complex.vertices() * rotation.transpose());
}

GeometricComplex rotate(const GeometricComplex& complex, const RotationParams& rotation)
{
    if (rotation.n != complex.ambient_dim()) throw std::invalid_argument("rotation dimension does not match the complex");
    return rotate(complex, rotation.matrix());
}

AlignmentObjective::AlignmentObjective(const GeometricComplex& fixed, const GeometricComplex& moving,
                                       const SamplingGrid& grid, double sharpness)
    : moving_(SimplexTable::from(moving)), grid_(grid), sharpness_(sharpness)
{
    if (fixed.ambient_dim() != moving.ambient_dim() || fixed.ambient_dim() != grid.ambient_dim()) {
        throw std::invalid_argument("alignment requires matching ambient dimensions");
    }
    target_ = ect_smooth_values(SimplexTable::from(fixed), grid_, sharpness_);
}

double AlignmentObjective::value(const RotationParams& params) const
{
    return evaluate(params, nullptr);
}

double AlignmentObjective::value_and_gradient(const RotationParams& params, Eigen::VectorXd& gradient) const
{
    return evaluate(params, &gradient);
}

double AlignmentObjective::evaluate(const RotationParams& params, Eigen::VectorXd* gradient) const
{
    const int n = grid_.ambient_dim();
    const auto l = static_cast<std::size_t>(grid_.num_thresholds());
    const Eigen::MatrixXd rot = params.matrix();
    const auto& thresholds = grid_.thresholds();
    const double step = grid_.step();

    std::vector<double> heights, row(l), tail(l);
    std::vector<Index> argmax;
    Eigen::MatrixXd dloss_drot = Eigen::MatrixXd::Zero(n, n);
    double loss = 0.0;

    for (int i = 0; i < grid_.num_directions(); ++i) {
        const Eigen::VectorXd v = grid_.directions().row(i).transpose();
        simplex_heights(moving_, rot.transpose() * v, heights, gradient ? &argmax : nullptr);
        std::fill(row.begin(), row.end(), 0.0);
        std::fill(tail.begin(), tail.end(), 0.0);
        for (std::size_t s = 0; s < moving_.size(); ++s) {
            detail::accumulate_logistic(heights[s], moving_.signs[s], sharpness_, thresholds, step, row.data(),
                                        tail.data());
        }
        double running = 0.0;
        for (std::size_t j = 0; j < l; ++j) {
            running += tail[j];
            row[j] = row[j] + running - target_(i, static_cast<Eigen::Index>(j));  // residual
            loss += row[j] * row[j];
        }
        if (!gradient) continue;

        // dL/dh_s = -2 lambda sign_s sum_j r_j s'_j; dh_s/dR = v u*^T.
        Eigen::VectorXd pull = Eigen::VectorXd::Zero(n);
        for (std::size_t s = 0; s < moving_.size(); ++s) {
            const double slope = detail::logistic_slope_dot(heights[s], sharpness_, thresholds, step, row.data());
            if (slope == 0.0) continue;
            const double dh = -2.0 * sharpness_ * moving_.signs[s] * slope;
            pull += dh * moving_.vertices.row(argmax[s]).transpose();
        }
        dloss_drot += v * pull.transpose();
    }
    if (gradient) *gradient = rotation_gradient(params, dloss_drot);
    return loss;
}

Points AlignmentResult::apply(const Points& moving_points) const
{
    return (moving_points.rowwise() - center_moving) * rotation.transpose() +
           center_fixed.replicate(moving_points.rows(), 1);
}

namespace {

struct RestartOutcome {
    RotationParams params;
    double loss = std::numeric_limits<double>::infinity();
    std::vector<double> trace;
    bool ok = false;
    std::string message;
};

RestartOutcome descend(const AlignmentObjective& objective, RotationParams params, const AlignOptions& options)
{
    RestartOutcome out;
    Eigen::VectorXd grad;
    double loss = objective.value_and_gradient(params, grad);
    if (!std::isfinite(loss) || !grad.allFinite()) {
        out.message = "non-finite loss at initialization";
        return out;
    }
    out.trace.push_back(loss);

    Eigen::VectorXd velocity = Eigen::VectorXd::Zero(params.skew.size());
    double step = options.initial_step;
    for (int iter = 0; iter < options.max_iters && step >= options.min_step; ++iter) {
        const double norm = grad.norm();
        if (norm == 0.0) break;
        // Normalized gradient keeps the step size in radians whatever the loss scale.
        velocity = options.momentum * velocity + grad / norm;
        RotationParams trial{params.n, params.skew - step * velocity};
        Eigen::VectorXd trial_grad;
        const double trial_loss = objective.value_and_gradient(trial, trial_grad);
        if (!std::isfinite(trial_loss) || !trial_grad.allFinite()) {
            out.message = "non-finite loss at iteration " + std::to_string(iter);
            return out;
        }
        if (trial_loss <= loss) {
            params = std::move(trial);
            loss = trial_loss;
            grad = std::move(trial_grad);
            out.trace.push_back(loss);
        } else {
            step *= 0.5;
            velocity.setZero();
        }
    }
    out.params = std::move(params);
    out.loss = loss;
    out.ok = true;
    return out;
}

struct Frame {
    GeometricComplex fixed;
    GeometricComplex moving;
    Eigen::RowVectorXd center_fixed;
    Eigen::RowVectorXd center_moving;
    double scale = 1.0;
};

Frame normalize_pair(const GeometricComplex& fixed, const GeometricComplex& moving, bool normalize)
{
    Frame f;
    const int n = fixed.ambient_dim();
    f.center_fixed = Eigen::RowVectorXd::Zero(n);
    f.center_moving = Eigen::RowVectorXd::Zero(n);
    if (!normalize) {
        f.fixed = fixed;
        f.moving = moving;
        return f;
    }
    if (fixed.num_vertices() == 0 || moving.num_vertices() == 0) throw std::invalid_argument("cannot align empty complexes");
    f.center_fixed = fixed.vertices().colwise().mean();
    f.center_moving = moving.vertices().colwise().mean();
    Points a = fixed.vertices().rowwise() - f.center_fixed;
    Points b = moving.vertices().rowwise() - f.center_moving;
    const double radius = std::max(a.rowwise().norm().maxCoeff(), b.rowwise().norm().maxCoeff());
    if (radius > 0.0) {
        f.scale = radius;
        a /= radius;
        b /= radius;
    }
    f.fixed = fixed.with_vertices(std::move(a));
    f.moving = moving.with_vertices(std::move(b));
    return f;
}

}  // namespace

AlignmentResult align(const GeometricComplex& fixed, const GeometricComplex& moving, const SamplingGrid& grid,
                      const AlignOptions& options)
{
    if (fixed.ambient_dim() != moving.ambient_dim()) throw std::invalid_argument("align: dimension mismatch");
    if (options.restarts < 1) throw std::invalid_argument("align: at least one restart is required");
    const Frame frame = normalize_pair(fixed, moving, options.normalize);
    const AlignmentObjective objective(frame.fixed, frame.moving, grid, options.sharpness);
    const int n = fixed.ambient_dim();

    std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(options.restarts));
    parallel_for(outcomes.size(), options.jobs, [&](std::size_t r) {
        RotationParams start = RotationParams::identity(n);
        if (r > 0) {
            auto rng = make_rng(options.seed, r);
            start = RotationParams::random(n, rng, options.restart_range);
        }
        outcomes[r] = descend(objective, std::move(start), options);
    });

    AlignmentResult result;
    int best = -1;
    for (std::size_t r = 0; r < outcomes.size(); ++r) {
        if (!outcomes[r].ok) {
            result.warnings.push_back("restart " + std::to_string(r) + " aborted: " + outcomes[r].message);
            continue;
        }
        ++result.restarts_used;
        if (best < 0 || outcomes[r].loss < outcomes[static_cast<std::size_t>(best)].loss) best = static_cast<int>(r);
    }
    if (best < 0) throw std::runtime_error("align: every restart failed (non-finite loss)");

    auto& winner = outcomes[static_cast<std::size_t>(best)];
    result.best_restart = best;
    result.best_rotation = winner.params;
    result.rotation = winner.params.matrix();
    result.loss_trace = std::move(winner.trace);
    result.objective = winner.loss;
    result.center_fixed = frame.center_fixed;
    result.center_moving = frame.center_moving;
    result.scale = frame.scale;

    const Eigen::MatrixXd ect_fixed = ect_hard_values(SimplexTable::from(frame.fixed), grid);
    const Eigen::MatrixXd ect_moving = ect_hard_values(SimplexTable::from(rotate(frame.moving, result.rotation)), grid);
    const Eigen::MatrixXd diff = ect_fixed - ect_moving;
    result.final_loss_l2sq = diff.squaredNorm();
    result.final_loss_linf = diff.cwiseAbs().maxCoeff();
    const Eigen::MatrixXd before = ect_fixed - ect_hard_values(SimplexTable::from(frame.moving), grid);
    result.initial_loss_l2sq = before.squaredNorm();
    result.initial_loss_linf = before.cwiseAbs().maxCoeff();
    return result;
}

double dect_estimate(const GeometricComplex& x, const GeometricComplex& y, const SamplingGrid& grid,
                     const AlignOptions& options)
{
    return align(x, y, grid, options).final_loss_linf;
}

LocalDistance local_align_distance(const GeometricComplex& complex, Index x, Index y, const NeighborhoodSpec& spec,
                                   const SamplingGrid& grid, AlignOptions options)
{
    const Neighborhood nx = neighborhood(complex, x, spec);
    const Neighborhood ny = neighborhood(complex, y, spec);
    options.normalize = false;
    const AlignmentResult r =
        align(normalize_at(nx.complex, nx.center), normalize_at(ny.complex, ny.center), grid, options);
    return {r.final_loss_l2sq, r.final_loss_linf};
}

double hausdorff(const Points& p, const Points& q)
{
    if (p.rows() == 0 || q.rows() == 0) throw std::invalid_argument("hausdorff: point sets must be non-empty");
    if (p.cols() != q.cols()) throw std::invalid_argument("hausdorff: dimension mismatch");
    auto directed = [](const Points& a, const Points& b) {
        double worst = 0.0;
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            double nearest = std::numeric_limits<double>::infinity();
            for (Eigen::Index j = 0; j < b.rows() && nearest > worst; ++j) {
                nearest = std::min(nearest, (a.row(i) - b.row(j)).squaredNorm());
            }
            worst = std::max(worst, nearest);
        }
        return worst;
    };
    return std::sqrt(std::max(directed(p, q), directed(q, p)));
}

}  // namespace lect
