#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <variant>
#include <vector>

#include "lect/alignment.hpp"
#include "lect/datagen.hpp"
#include "lect/ect.hpp"
#include "lect/experiments.hpp"
#include "lect/io.hpp"
#include "lect/pipeline.hpp"

namespace fs = std::filesystem;
using namespace lect;

namespace {

enum ExitCode { kOk = 0, kRuntime = 1, kUsage = 2, kParse = 3, kBudget = 4 };

constexpr double kCoarseGridHint = 0.05;

void warn_if_coarse(int n, int m, int l)
{
    if (n < 2) return;
    const double hint = grid_error_hint(n, m, l);
    if (hint > kCoarseGridHint) {
        std::cerr << "warning: coarse grid (m=" << m << ", l=" << l << ", resolution hint " << format_double(hint)
                  << ")\n";
    }
}

using Input = std::variant<GeometricComplex, FeaturedGraph>;

// Complex files start with "ambient_dim n_vertices", graph files with "n_nodes n_edges feat_dim".
Input read_input(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream tokens(line);
        std::string token;
        int count = 0;
        while (tokens >> token) ++count;
        if (count == 3) return read_graph(path);
        return read_complex(path);
    }
    throw ParseError(1, "empty input");
}

GeometricComplex as_complex(const Input& input)
{
    if (const auto* g = std::get_if<FeaturedGraph>(&input)) return embed(*g);
    return std::get<GeometricComplex>(input);
}

Json grid_json(const SamplingGrid& grid)
{
    Json directions = Json::array();
    for (Eigen::Index i = 0; i < grid.directions().rows(); ++i) {
        directions.push_back(std::vector<double>(grid.directions().row(i).data(),
                                                 grid.directions().row(i).data() + grid.directions().cols()));
    }
    Json j;
    j["seed"] = grid.seed();
    j["bounds"] = {grid.lower(), grid.upper()};
    j["directions"] = std::move(directions);
    j["thresholds"] = grid.thresholds();
    return j;
}

std::pair<double, double> bounds_of(const Json& cfg, double radius)
{
    if (cfg.contains("bounds") && !cfg["bounds"].is_null()) {
        const auto b = cfg["bounds"].get<std::vector<double>>();
        return {b.at(0), b.at(1)};
    }
    return {-radius, radius};
}

double max_norm(const GeometricComplex& complex)
{
    const double r = complex.num_vertices() ? complex.vertices().rowwise().norm().maxCoeff() : 0.0;
    return r > 0.0 ? r : 1.0;
}

std::vector<double> row_major(const Eigen::MatrixXd& m)
{
    std::vector<double> out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
    }
    return out;
}

void cmd_ect(const Json& cfg, const fs::path& output)
{
    const GeometricComplex complex = as_complex(read_input(cfg.at("input").get<std::string>()));
    const int m = cfg.at("m"), l = cfg.at("l");
    const std::uint64_t cost = static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(l) * complex.total_simplices();
    if (cost > cfg.at("budget").get<std::uint64_t>()) {
        throw BudgetExceeded("ECT cost estimate " + std::to_string(cost) + " exceeds the budget");
    }
    warn_if_coarse(complex.ambient_dim(), m, l);
    const auto [a, b] = bounds_of(cfg, max_norm(complex));
    auto grid = std::make_shared<const SamplingGrid>(
        make_grid(complex.ambient_dim(), m, l, a, b, cfg.at("seed").get<std::uint64_t>()));
    const bool smooth = cfg.at("smooth");
    const EctMatrix ect = smooth ? ect_smooth(complex, grid, cfg.at("lambda")) : ect_hard(complex, grid);

    Json meta;
    meta["config"] = cfg;
    meta["kind"] = smooth ? "smooth" : "hard";
    meta["euler_characteristic"] = euler_characteristic(complex);
    meta["grid"] = grid_json(*grid);
    write_matrix_file(output, std::move(meta), ect.values);
}

void cmd_lect(const Json& cfg, const fs::path& output)
{
    const GeometricComplex complex = as_complex(read_input(cfg.at("input").get<std::string>()));
    LectOptions o;
    o.spec = {parse_neighborhood_mode(cfg.at("mode")), cfg.at("k")};
    o.spec.validate();
    o.num_directions = cfg.at("m");
    o.num_thresholds = cfg.at("l");
    o.seed = cfg.at("seed");
    o.normalize = cfg.at("normalize");
    if (!cfg.at("bounds").is_null()) o.bounds = bounds_of(cfg, 1.0);
    o.jobs = cfg.at("jobs");
    const std::uint64_t cost = cost_estimate(complex, o.spec, o.num_directions, o.num_thresholds);
    if (cost > cfg.at("budget").get<std::uint64_t>()) {
        throw BudgetExceeded("l-ECT cost estimate " + std::to_string(cost) +
                             " (sum over vertices x of m*l*|N_k(x)|) exceeds the budget");
    }
    warn_if_coarse(complex.ambient_dim(), o.num_directions, o.num_thresholds);
    const LectSet set = lect::lect(complex, o);

    Json meta;
    meta["config"] = cfg;
    meta["neighborhood"] = o.spec.to_string();
    meta["normalized"] = set.normalized;
    meta["grid"] = grid_json(*set.grid);
    write_matrix_file(output, std::move(meta), set.vectors);
}

FeatureTable features_from(const Json& cfg, FeaturedGraph& graph)
{
    const Input input = read_input(cfg.at("input").get<std::string>());
    if (!std::holds_alternative<FeaturedGraph>(input)) throw std::invalid_argument("features need a graph input");
    graph = std::get<FeaturedGraph>(input);
    FeatureOptions fo;
    fo.hops = cfg.at("hops").get<std::vector<int>>();
    fo.num_directions = cfg.at("m");
    fo.num_thresholds = cfg.at("l");
    fo.seed = cfg.at("seed");
    fo.jitter_sigma = cfg.at("jitter");
    fo.budget = cfg.at("budget");
    fo.jobs = cfg.at("jobs");
    warn_if_coarse(graph.feature_dim(), fo.num_directions, fo.num_thresholds);
    return build_features(graph, fo);
}

void cmd_features(const Json& cfg, const fs::path& output)
{
    FeaturedGraph graph;
    const FeatureTable table = features_from(cfg, graph);
    const std::vector<int>* labels = table.labels ? &*table.labels : nullptr;
    write_csv(output, table.column_ids(), table.data, labels, "config " + cfg.dump());
    if (!cfg.at("binary").is_null()) {
        Json meta;
        meta["config"] = cfg;
        meta["columns"] = table.column_ids();
        write_matrix_file(cfg.at("binary").get<std::string>(), std::move(meta), table.data);
    }
}

void cmd_align(const Json& cfg, const fs::path& output)
{
    const GeometricComplex fixed = as_complex(read_input(cfg.at("fixed").get<std::string>()));
    const GeometricComplex moving = as_complex(read_input(cfg.at("moving").get<std::string>()));
    const int m = cfg.at("m"), l = cfg.at("l");
    warn_if_coarse(fixed.ambient_dim(), m, l);
    const auto [a, b] = bounds_of(cfg, 1.0);
    const SamplingGrid grid = make_grid(fixed.ambient_dim(), m, l, a, b, cfg.at("seed"));
    AlignOptions o;
    o.sharpness = cfg.at("lambda");
    o.restarts = cfg.at("restarts");
    o.max_iters = cfg.at("max_iters");
    o.seed = cfg.at("seed");
    o.jobs = cfg.at("jobs");
    const AlignmentResult r = align(fixed, moving, grid, o);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';

    Json report;
    report["config"] = cfg;
    report["rotation"] = row_major(r.rotation);
    report["rotation_params"] = std::vector<double>(r.best_rotation.skew.data(),
                                                    r.best_rotation.skew.data() + r.best_rotation.skew.size());
    report["best_restart"] = r.best_restart;
    report["restarts_used"] = r.restarts_used;
    report["objective"] = r.objective;
    report["loss_l2sq"] = r.final_loss_l2sq;
    report["loss_linf"] = r.final_loss_linf;
    report["loss_identity_l2sq"] = r.initial_loss_l2sq;
    report["loss_identity_linf"] = r.initial_loss_linf;
    report["hausdorff_pre"] = hausdorff(fixed.vertices(), moving.vertices());
    report["hausdorff_post"] = hausdorff(fixed.vertices(), r.apply(moving.vertices()));
    report["iterations"] = r.loss_trace.size();
    write_json(output, report);

    if (!cfg.at("trace").is_null()) {
        std::ofstream trace(cfg.at("trace").get<std::string>());
        if (!trace) throw std::runtime_error("cannot write the loss trace");
        trace << "# config " << cfg.dump() << "\niteration,loss\n";
        for (std::size_t i = 0; i < r.loss_trace.size(); ++i) trace << i << ',' << format_double(r.loss_trace[i]) << '\n';
    }
    std::cout << "loss_linf " << format_double(r.final_loss_linf) << '\n';
}

void cmd_classify(const Json& cfg, const fs::path& output)
{
    FeaturedGraph graph;
    FeatureTable table = features_from(cfg, graph);
    const long subsample = cfg.at("subsample");
    if (subsample >= 0) table = subsample_features(table, static_cast<std::size_t>(subsample), cfg.at("seed"));
    const SplitSpec splits =
        make_splits(table.rows(), cfg.at("seed"), cfg.at("test_fraction"), cfg.at("val_fraction"));
    const TrainResult r = train_linear(table, splits, {cfg.at("epochs"), cfg.at("l2")});

    Json report;
    report["config"] = cfg;
    report["columns"] = table.columns.size();
    report["edge_homophily"] = graph.labels ? Json(edge_homophily(graph)) : Json();
    report["train_accuracy"] = r.train_accuracy;
    report["val_accuracy"] = r.val_accuracy;
    report["test_accuracy"] = r.test_accuracy;
    Json per_class = Json::array();
    for (const auto& c : r.per_class) {
        per_class.push_back({{"label", c.label},
                             {"precision", c.precision},
                             {"recall", c.recall},
                             {"f1", c.f1},
                             {"support", c.support}});
    }
    report["per_class"] = std::move(per_class);
    Json top = Json::array();
    const auto ranked = feature_importance(r.model, table);
    for (std::size_t i = 0; i < std::min<std::size_t>(10, ranked.size()); ++i) {
        Json entry{{"column", ranked[i].info.id()}, {"score", ranked[i].score}};
        if (ranked[i].direction.size()) {
            entry["direction"] = std::vector<double>(ranked[i].direction.data(),
                                                     ranked[i].direction.data() + ranked[i].direction.size());
            entry["threshold"] = ranked[i].threshold;
        }
        top.push_back(std::move(entry));
    }
    report["top_features"] = std::move(top);
    write_json(output, report);
    std::cout << "test_accuracy " << format_double(r.test_accuracy) << '\n';
}

void cmd_generate(const Json& cfg, const fs::path& output)
{
    GeneratorSpec spec;
    spec.kind = parse_generator_kind(cfg.at("kind"));
    spec.seed = cfg.at("seed");
    spec.params = cfg.at("params").get<std::map<std::string, double>>();
    const Generated data = generate(spec);
    if (const auto* c = std::get_if<GeometricComplex>(&data)) write_complex(output, *c, &cfg);
    else write_graph(output, std::get<FeaturedGraph>(data), &cfg);
}

void cmd_repro(const Json& cfg, const fs::path& output)
{
    const ReproConfig rc = ReproConfig::from_json(cfg);
    Json report = run_repro(rc);
    report["config"] = cfg;
    fs::create_directories(output);
    write_json(output / (rc.experiment + ".summary.json"), report);
    std::ofstream csv(output / (rc.experiment + ".trials.csv"));
    if (!csv) throw std::runtime_error("cannot write the trial table");
    csv << "# config " << cfg.dump() << '\n';
    for (const auto& line : trials_csv(report)) csv << line << '\n';
    std::cout << report["results"].dump(2) << '\n';
}

void execute(const Json& cfg, const fs::path& output)
{
    const std::string command = cfg.at("command");
    if (command == "ect") cmd_ect(cfg, output);
    else if (command == "lect") cmd_lect(cfg, output);
    else if (command == "features") cmd_features(cfg, output);
    else if (command == "align") cmd_align(cfg, output);
    else if (command == "classify") cmd_classify(cfg, output);
    else if (command == "generate") cmd_generate(cfg, output);
    else if (command == "repro") cmd_repro(cfg, output);
    else throw std::invalid_argument("unknown command '" + command + "' in configuration");
}

Json bounds_json(const std::vector<double>& bounds)
{
    if (bounds.empty()) return nullptr;
    if (!(bounds[0] < bounds[1])) throw std::invalid_argument("--bounds needs a < b");
    return bounds;
}

struct Flags {
    int m = 64;
    int l = 64;
    std::uint64_t seed = 0;
    std::vector<double> bounds;
    double lambda = 100.0;
    int restarts = 8;
    int max_iters = 500;
    int trials = 50;
    int jobs = 1;
    std::uint64_t budget = 20'000'000'000ull;
    int k = 1;
    std::string mode = "hop";
    std::vector<int> hops{1};
};

CLI::Option* add_m(CLI::App* s, Flags& f) { return s->add_option("--m", f.m, "number of directions")->envname("LECT_M"); }
CLI::Option* add_l(CLI::App* s, Flags& f) { return s->add_option("--l", f.l, "number of thresholds")->envname("LECT_L"); }
CLI::Option* add_seed(CLI::App* s, Flags& f) { return s->add_option("--seed", f.seed, "random seed")->envname("LECT_SEED"); }
CLI::Option* add_bounds(CLI::App* s, Flags& f)
{
    return s->add_option("--bounds", f.bounds, "threshold interval a b")->expected(2)->allow_extra_args(false);
}
CLI::Option* add_jobs(CLI::App* s, Flags& f)
{
    return s->add_option("--jobs", f.jobs, "worker threads")->envname("LECT_JOBS")->check(CLI::PositiveNumber);
}
CLI::Option* add_budget(CLI::App* s, Flags& f)
{
    return s->add_option("--budget", f.budget, "cap on simplex-threshold tests")->envname("LECT_BUDGET");
}
CLI::Option* add_lambda(CLI::App* s, Flags& f)
{
    return s->add_option("--lambda", f.lambda, "logistic sharpness")->envname("LECT_LAMBDA");
}
CLI::Option* add_restarts(CLI::App* s, Flags& f)
{
    return s->add_option("--restarts", f.restarts, "optimizer restarts")->envname("LECT_RESTARTS");
}
CLI::Option* add_trials(CLI::App* s, Flags& f)
{
    return s->add_option("--trials", f.trials, "trials per setting")->envname("LECT_TRIALS");
}

int run(int argc, char** argv)
{
    CLI::App app{"Euler characteristic transforms, local ECT features and ECT-based rotation alignment"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "lect 1.0.0");
    Flags f;
    std::string input, output, fixed, moving, trace, binary, from, kind, experiment;
    bool smooth = false, no_normalize = false;
    double jitter = 0.0, l2 = 1e-2, test_fraction = 0.25, val_fraction = 0.1;
    double radius = 1.0, noise = 0.0, outlier_fraction = 0.0, homophily = 0.1;
    int epochs = 500, points_per_sphere = 500, nodes = 600, classes = 3;
    long subsample = -1;
    std::vector<int> ks;
    std::vector<long> counts;
    std::vector<std::string> params;

    auto* ect = app.add_subcommand("ect", "ECT of a complex or graph on a sampled grid");
    ect->add_option("input", input, "complex or graph file")->required()->check(CLI::ExistingFile);
    ect->add_option("-o,--output", output, "matrix file")->required();
    add_m(ect, f);
    add_l(ect, f);
    add_seed(ect, f);
    add_bounds(ect, f);
    add_budget(ect, f);
    add_lambda(ect, f);
    ect->add_flag("--smooth", smooth, "logistic relaxation instead of the exact ECT");

    auto* lect_cmd = app.add_subcommand("lect", "local ECT vector of every vertex");
    lect_cmd->add_option("input", input, "complex or graph file")->required()->check(CLI::ExistingFile);
    lect_cmd->add_option("-o,--output", output, "matrix file")->required();
    lect_cmd->add_option("--k", f.k, "hops or nearest neighbors")->envname("LECT_K");
    lect_cmd->add_option("--mode", f.mode, "neighborhood kind")->check(CLI::IsMember({"hop", "knn"}))->envname("LECT_MODE");
    add_m(lect_cmd, f);
    add_l(lect_cmd, f);
    add_seed(lect_cmd, f);
    add_bounds(lect_cmd, f);
    add_jobs(lect_cmd, f);
    add_budget(lect_cmd, f);
    lect_cmd->add_flag("--no-normalize", no_normalize, "keep neighborhood coordinates as they are");

    auto* features = app.add_subcommand("features", "node feature table: raw features plus hop l-ECT blocks");
    auto* classify = app.add_subcommand("classify", "linear classifier on the node feature table");
    for (auto* s : {features, classify}) {
        s->add_option("input", input, "graph file")->required()->check(CLI::ExistingFile);
        s->add_option("-o,--output", output, s == features ? "CSV file" : "metrics JSON")->required();
        s->add_option("--k", f.hops, "hop depths, one l-ECT block each (0 values: raw features only)")
            ->envname("LECT_K")
            ->expected(0, 16);
        add_m(s, f);
        add_l(s, f);
        add_seed(s, f);
        add_jobs(s, f);
        add_budget(s, f);
        s->add_option("--jitter", jitter, "Gaussian jitter used to separate colliding features");
    }
    features->add_option("--binary", binary, "also write the table in the binary matrix format");
    classify->add_option("--subsample", subsample, "keep this many l-ECT columns (all when negative)");
    classify->add_option("--epochs", epochs, "gradient descent epochs")->check(CLI::PositiveNumber);
    classify->add_option("--l2", l2, "L2 penalty")->check(CLI::NonNegativeNumber);
    classify->add_option("--test-fraction", test_fraction, "held-out fraction")->check(CLI::Range(0.0, 1.0));
    classify->add_option("--val-fraction", val_fraction, "validation fraction of the rest")->check(CLI::Range(0.0, 1.0));

    auto* align_cmd = app.add_subcommand("align", "rotation aligning MOVING onto FIXED by ECT matching");
    align_cmd->add_option("fixed", fixed, "reference complex")->required()->check(CLI::ExistingFile);
    align_cmd->add_option("moving", moving, "complex to rotate")->required()->check(CLI::ExistingFile);
    align_cmd->add_option("-o,--output", output, "report JSON")->required();
    align_cmd->add_option("--trace", trace, "loss trace CSV");
    align_cmd->add_option("--max-iters", f.max_iters, "iterations per restart")->check(CLI::PositiveNumber);
    add_m(align_cmd, f);
    add_l(align_cmd, f);
    add_seed(align_cmd, f);
    add_bounds(align_cmd, f);
    add_lambda(align_cmd, f);
    add_restarts(align_cmd, f);
    add_jobs(align_cmd, f);

    auto* gen = app.add_subcommand("generate", "synthetic complex or graph");
    gen->add_option("--kind", kind, "generator")
        ->required()
        ->check(CLI::IsMember({"k_star", "wedged_spheres", "wedged_octahedra", "random_complex", "heterophily_graph",
                               "point_cloud"}));
    gen->add_option("-o,--output", output, "output file")->required();
    add_seed(gen, f);
    auto* gen_k = gen->add_option("--k", f.k, "star size for k_star");
    gen->add_option("--param", params, "generator parameter key=value (repeatable)");

    auto* repro = app.add_subcommand("repro", "seeded multi-trial experiment");
    repro->add_option("experiment", experiment, "experiment id")->check(CLI::IsMember(experiment_ids()));
    repro->add_option("--from", from, "re-run the configuration embedded in this file")->check(CLI::ExistingFile);
    repro->add_option("-o,--out-dir", output, "output directory")->default_val("repro");
    auto* r_m = add_m(repro, f);
    auto* r_l = add_l(repro, f);
    auto* r_seed = add_seed(repro, f);
    auto* r_bounds = add_bounds(repro, f);
    auto* r_lambda = add_lambda(repro, f);
    auto* r_restarts = add_restarts(repro, f);
    auto* r_trials = add_trials(repro, f);
    auto* r_jobs = add_jobs(repro, f);
    auto* r_budget = add_budget(repro, f);
    auto* r_ks = repro->add_option("--ks", ks, "star sizes (kstar-align)");
    auto* r_radius = repro->add_option("--radius", radius, "star radius (kstar-align)");
    auto* r_pps = repro->add_option("--points-per-sphere", points_per_sphere, "sample size (wedge-align)");
    auto* r_noise = repro->add_option("--noise", noise, "Gaussian noise sigma (wedge-align)");
    auto* r_out = repro->add_option("--outlier-fraction", outlier_fraction, "outlier fraction (wedge-align)");
    auto* r_nodes = repro->add_option("--nodes", nodes, "graph size");
    auto* r_classes = repro->add_option("--classes", classes, "class count");
    auto* r_h = repro->add_option("--homophily", homophily, "target edge homophily");
    auto* r_hops = repro->add_option("--k", f.hops, "hop depths");
    auto* r_counts = repro->add_option("--counts", counts, "l-ECT column counts (-1: all)");

    auto* rerun = app.add_subcommand("rerun", "re-run the configuration embedded in an output file");
    rerun->add_option("file", from, "any file written by lect")->required()->check(CLI::ExistingFile);
    rerun->add_option("-o,--output", output, "write here instead of the recorded output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    Json cfg;
    if (app.got_subcommand(ect)) {
        cfg = {{"command", "ect"}, {"input", input}, {"output", output}, {"m", f.m}, {"l", f.l}, {"seed", f.seed},
               {"bounds", bounds_json(f.bounds)}, {"smooth", smooth}, {"lambda", f.lambda}, {"budget", f.budget}};
    } else if (app.got_subcommand(lect_cmd)) {
        cfg = {{"command", "lect"}, {"input", input}, {"output", output}, {"k", f.k}, {"mode", f.mode},
               {"m", f.m}, {"l", f.l}, {"seed", f.seed}, {"bounds", bounds_json(f.bounds)},
               {"normalize", !no_normalize}, {"budget", f.budget}, {"jobs", f.jobs}};
    } else if (app.got_subcommand(features) || app.got_subcommand(classify)) {
        cfg = {{"command", app.got_subcommand(features) ? "features" : "classify"}, {"input", input},
               {"output", output}, {"hops", f.hops}, {"m", f.m}, {"l", f.l}, {"seed", f.seed},
               {"jitter", jitter}, {"budget", f.budget}, {"jobs", f.jobs}};
        if (app.got_subcommand(features)) {
            cfg["binary"] = binary.empty() ? Json() : Json(binary);
        } else {
            cfg["subsample"] = subsample;
            cfg["epochs"] = epochs;
            cfg["l2"] = l2;
            cfg["test_fraction"] = test_fraction;
            cfg["val_fraction"] = val_fraction;
        }
    } else if (app.got_subcommand(align_cmd)) {
        cfg = {{"command", "align"}, {"fixed", fixed}, {"moving", moving}, {"output", output}, {"m", f.m},
               {"l", f.l}, {"seed", f.seed}, {"bounds", bounds_json(f.bounds)}, {"lambda", f.lambda},
               {"restarts", f.restarts}, {"max_iters", f.max_iters}, {"jobs", f.jobs},
               {"trace", trace.empty() ? Json() : Json(trace)}};
    } else if (app.got_subcommand(gen)) {
        Json p = Json::object();
        if (gen_k->count()) p["k"] = f.k;
        for (const auto& kv : params) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("--param expects key=value, got '" + kv + "'");
            p[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        }
        cfg = {{"command", "generate"}, {"kind", kind}, {"seed", f.seed}, {"params", p}, {"output", output}};
    } else if (app.got_subcommand(repro)) {
        ReproConfig rc;
        if (!from.empty()) {
            rc = ReproConfig::from_json(read_embedded_config(from));
        } else {
            if (experiment.empty()) throw std::invalid_argument("repro needs an experiment id or --from");
            rc = ReproConfig::defaults(experiment);
        }
        if (r_m->count()) rc.num_directions = f.m;
        if (r_l->count()) rc.num_thresholds = f.l;
        if (r_seed->count()) rc.seed = f.seed;
        if (r_bounds->count()) rc.bounds = {f.bounds.at(0), f.bounds.at(1)};
        if (r_lambda->count()) rc.sharpness = f.lambda;
        if (r_restarts->count()) rc.restarts = f.restarts;
        if (r_trials->count()) rc.trials = f.trials;
        if (r_jobs->count()) rc.jobs = f.jobs;
        if (r_budget->count()) rc.budget = f.budget;
        if (r_ks->count()) rc.ks = ks;
        if (r_radius->count()) rc.radius = radius;
        if (r_pps->count()) rc.points_per_sphere = points_per_sphere;
        if (r_noise->count()) rc.noise_sigma = noise;
        if (r_out->count()) rc.outlier_fraction = outlier_fraction;
        if (r_nodes->count()) rc.nodes = nodes;
        if (r_classes->count()) rc.classes = classes;
        if (r_h->count()) rc.homophily = homophily;
        if (r_hops->count()) rc.hops = f.hops;
        if (r_counts->count()) rc.counts = counts;
        rc.validate();
        cfg = {{"command", "repro"}, {"output", output}};
        cfg.update(rc.to_json());
    } else {
        cfg = read_embedded_config(from);
        if (!cfg.contains("command") || !cfg.contains("output")) {
            throw std::invalid_argument(from + " does not carry a runnable configuration");
        }
    }
    execute(cfg, output.empty() ? fs::path(cfg.at("output").get<std::string>()) : fs::path(output));
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBudget;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kParse;
    } catch (const Json::exception& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kParse;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
}
