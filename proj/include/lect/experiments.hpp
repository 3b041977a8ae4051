#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lect/io.hpp"

namespace lect {

/// Seeded multi-trial experiment protocol. Every field is serialized so a
/// summary can be re-run from its own "config" entry.
struct ReproConfig {
    std::string experiment = "kstar-align";
    int trials = 50;
    std::uint64_t seed = 0;
    int num_directions = 64;
    int num_thresholds = 64;
    std::pair<double, double> bounds{-1.0, 1.0};
    double sharpness = 100.0;
    int restarts = 8;
    int max_iters = 500;
    int jobs = 1;  // does not affect results

    // kstar-align
    std::vector<int> ks{2, 3, 5, 11};
    double radius = 1.0;

    // wedge-align
    int points_per_sphere = 500;
    double noise_sigma = 0.0;
    double outlier_fraction = 0.0;

    // hetero-class, ablation-subsample
    int nodes = 600;
    int classes = 3;
    int feat_dim = 2;
    double homophily = 0.1;
    int degree = 3;
    std::vector<int> hops{1};
    std::vector<long> counts{0, 50, 500, -1};  // -1 keeps every l-ECT column
    int epochs = 500;
    double l2 = 1e-2;
    std::uint64_t budget = 20'000'000'000ull;

    /// Per-experiment defaults; throws std::invalid_argument for unknown ids.
    static ReproConfig defaults(const std::string& experiment);
    static ReproConfig from_json(const Json& json);
    Json to_json() const;
    void validate() const;
};

std::vector<std::string> experiment_ids();

/// Runs the protocol. The returned document holds "config", "results"
/// (summary statistics) and "trials" (one record per trial, in trial order).
Json run_repro(const ReproConfig& config);

/// Trial records as CSV rows (header first).
std::vector<std::string> trials_csv(const Json& report);

double median(std::vector<double> values);

}  // namespace lect
