#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lect/complex.hpp"
#include "lect/ect.hpp"

namespace lect {

enum class ColumnKind { raw, lect };

struct ColumnInfo {
    ColumnKind kind = ColumnKind::raw;
    int source = 0;     // raw feature index (raw columns)
    int hops = 0;       // k of the l-ECT block
    int direction = 0;  // direction index within the block's grid
    int threshold = 0;  // threshold index within the block's grid

    /// "raw:3" or "lect1:d12:t5".
    std::string id() const;
};

/// Node features followed by one l-ECT block per hop depth.
struct FeatureTable {
    Eigen::MatrixXd data;
    std::vector<ColumnInfo> columns;
    std::optional<std::vector<int>> labels;
    std::map<int, std::shared_ptr<const SamplingGrid>> grids;  // keyed by hop depth

    std::size_t rows() const { return static_cast<std::size_t>(data.rows()); }
    std::size_t raw_columns() const;
    std::size_t lect_columns() const { return columns.size() - raw_columns(); }
    std::vector<std::string> column_ids() const;
};

struct FeatureOptions {
    std::vector<int> hops;  // one l-ECT block per entry, in order
    int num_directions = 64;
    int num_thresholds = 64;
    std::uint64_t seed = 0;
    double jitter_sigma = 0.0;
    std::uint64_t budget = 20'000'000'000ull;
    int jobs = 1;
};

/// Embeds the graph and appends normalized hop l-ECT blocks after the raw
/// features. Every block uses the grid drawn from the same seed. Throws
/// std::runtime_error when the cost estimate exceeds the budget.
FeatureTable build_features(const FeaturedGraph& graph, const FeatureOptions& options);

/// Keeps every raw column plus `count` l-ECT columns sampled uniformly
/// without replacement (source order preserved).
FeatureTable subsample_features(const FeatureTable& table, std::size_t count, std::uint64_t seed);

struct SplitSpec {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;
    std::uint64_t seed = 0;
};

/// Seeded shuffle; `test_fraction` of the rows for testing and
/// `val_fraction` of the remainder for validation.
SplitSpec make_splits(std::size_t rows, std::uint64_t seed, double test_fraction = 0.25, double val_fraction = 0.1);

struct LinearOptions {
    int epochs = 500;
    double l2 = 1e-2;
};

struct LinearModel {
    std::vector<int> classes;      // label value of each output
    Eigen::MatrixXd weights;       // columns x classes, on standardized inputs
    Eigen::RowVectorXd bias;
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd scale;

    Eigen::MatrixXd decision(const Eigen::MatrixXd& rows) const;
    std::vector<int> predict(const Eigen::MatrixXd& rows) const;
};

struct ClassMetrics {
    int label = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

struct TrainResult {
    LinearModel model;
    double train_accuracy = 0.0;
    double val_accuracy = 0.0;
    double test_accuracy = 0.0;
    std::vector<ClassMetrics> per_class;  // on the test split
};

/// One-vs-rest L2-regularized logistic regression, full-batch gradient
/// descent with step 1/L (L: Lipschitz bound from power iteration).
TrainResult train_linear(const FeatureTable& table, const SplitSpec& splits, const LinearOptions& options = {});

struct Importance {
    std::size_t column = 0;
    double score = 0.0;  // max over classes of |weight|
    ColumnInfo info;
    Eigen::VectorXd direction;  // empty for raw columns
    double threshold = 0.0;
};

/// Columns ranked by score, ties broken by column index.
std::vector<Importance> feature_importance(const LinearModel& model, const FeatureTable& table);

/// Regular lattice with `points_per_axis` points per axis and the given
/// spacing, centered at the origin.
struct LatticeSpec {
    int points_per_axis = 4;
    double spacing = 1.0 / 3.0;
};

struct ReconstructionReport {
    std::uint64_t candidates = 0;
    std::size_t configurations = 0;  // matching (center, neighbors, edges) choices
    std::size_t matches = 0;         // distinct embedded complexes among them
    bool true_matched = false;
    bool unique() const { return matches == 1 && true_matched; }
};

/**
 * Exhaustive invertibility probe for the 1-hop l-ECT of `vertex`.
 *
 * Candidate patches place the center on any lattice point, choose up to
 * (true neighbor count + extra_neighbors) other lattice points as its
 * neighbors, and any set of edges among those neighbors consistent with the
 * Euler characteristic read off the target. Each candidate's hard ECT is
 * compared with the target, direction by direction. Matches are counted as
 * embedded complexes: when several vertices are adjacent to all others, the
 * choice of center among them does not change the complex and is not
 * counted twice. Features must lie on the lattice; grid bounds must cover it.
 */
ReconstructionReport check_reconstruction_t1(const FeaturedGraph& graph, Index vertex, const SamplingGrid& grid,
                                             const LatticeSpec& lattice, int extra_neighbors = 1,
                                             std::uint64_t budget = 50'000'000);

struct DistinguishReport {
    bool ect_equal = false;
    bool isomorphic = false;
    bool grid_artifact = false;  // disagreement on a grid below the direction floor

    bool holds() const { return ect_equal == isomorphic; }
    bool passed() const { return holds() || grid_artifact; }
};

/// Compares ECT equality of the two embedded graphs with the isomorphism oracle.
DistinguishReport check_distinguishes_t2(const FeaturedGraph& g1, const FeaturedGraph& g2, const SamplingGrid& grid,
                                         int direction_floor = 16, std::size_t max_nodes = 12);

}  // namespace lect
