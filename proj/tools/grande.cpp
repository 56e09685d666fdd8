// Command-line front end: graph construction, fold-based training runs,
// sigma sweeps, and synthetic data generation over the feature/label file
// formats described in the README.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "grande/eval.hpp"
#include "grande/graph.hpp"
#include "grande/io.hpp"
#include "grande/models.hpp"

using grande::DegreeKind;
using grande::ModelKind;
using grande::TrainConfig;
using json = nlohmann::ordered_json;

namespace {

struct Options {
    std::string features;
    std::string labels;
    std::string out;
    std::size_t k = 40;
    std::string model = "sgc";
    std::string degree = "centrality";
    double sigma = 0.2;
    std::string sigma_grid = "0.1:1.0:0.1";
    std::size_t k_steps = 0;  // 0 = per-model default (2 for sgc, 10 for appnp)
    double alpha = 0.1;
    std::size_t hidden = 256;
    double dropout = 0.5;
    double lr = 1e-3;
    std::size_t epochs = 200;
    std::size_t folds = 10;
    std::size_t executions = 5;
    std::uint64_t seed = 1;

    // gen-synthetic parameters
    std::size_t classes = 3;
    std::size_t per_class = 100;
    std::size_t dim = 16;
    double separation = 4.0;
    double noise = 1.0;
};

class Timer {
  public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

TrainConfig to_train_config(const Options& opt) {
    TrainConfig cfg;
    cfg.epochs = opt.epochs;
    cfg.lr = opt.lr;
    cfg.degree_kind = opt.degree == "grande" ? DegreeKind::grande : DegreeKind::centrality;
    cfg.sigma = opt.sigma;
    cfg.seed = opt.seed;
    cfg.model = opt.model == "appnp" ? ModelKind::appnp : ModelKind::sgc;
    cfg.k_steps = opt.k_steps != 0 ? opt.k_steps
                                   : (cfg.model == ModelKind::appnp ? std::size_t{10}
                                                                    : std::size_t{2});
    cfg.alpha = opt.alpha;
    cfg.hidden = opt.hidden;
    cfg.dropout = opt.dropout;
    return cfg;
}

json config_echo(const std::string& command, const Options& opt, const TrainConfig& cfg) {
    json j;
    j["command"] = command;
    j["features"] = opt.features;
    j["labels"] = opt.labels;
    j["k"] = opt.k;
    j["model"] = cfg.model == ModelKind::appnp ? "appnp" : "sgc";
    j["degree"] = cfg.degree_kind == DegreeKind::grande ? "grande" : "centrality";
    j["sigma"] = cfg.sigma;
    j["K"] = cfg.k_steps;
    j["alpha"] = cfg.alpha;
    j["hidden"] = cfg.hidden;
    j["dropout"] = cfg.dropout;
    j["lr"] = cfg.lr;
    j["epochs"] = cfg.epochs;
    j["folds"] = opt.folds;
    j["executions"] = opt.executions;
    j["seed"] = cfg.seed;
    return j;
}

json report_to_json(const grande::MetricsReport& report) {
    json j;
    j["cell_accuracies"] = report.cell_accuracy;
    j["mean"] = report.mean;
    j["std"] = report.stddev;
    j["execution_seeds"] = report.execution_seeds;
    return j;
}

std::vector<double> parse_sigma_grid(const std::string& spec) {
    const auto first = spec.find(':');
    const auto second = spec.find(':', first + 1);
    if (first == std::string::npos || second == std::string::npos)
        throw std::invalid_argument("--sigma-grid expects lo:hi:step, got \"" + spec + "\"");
    const double lo = std::stod(spec.substr(0, first));
    const double hi = std::stod(spec.substr(first + 1, second - first - 1));
    const double step = std::stod(spec.substr(second + 1));
    if (!(lo > 0.0) || !(step > 0.0) || hi < lo)
        throw std::invalid_argument("--sigma-grid needs 0 < lo <= hi and step > 0");
    std::vector<double> grid;
    for (std::size_t i = 0;; ++i) {
        const double v = lo + static_cast<double>(i) * step;
        if (v > hi + step * 0.5) break;
        grid.push_back(v);
    }
    return grid;
}

grande::NeighborGraph build_graph(const grande::DenseMatrix& x, std::size_t k) {
    const grande::RankedLists lists = grande::compute_ranked_lists(x, k);
    return grande::build_reciprocal_graph(lists, k);
}

void write_result(const std::string& path, json doc) {
    grande::write_text_file(path, doc.dump(2) + "\n");
}

int command_build_graph(const Options& opt) {
    const Timer timer;
    const grande::DenseMatrix x = grande::load_features(opt.features);
    const grande::NeighborGraph g = build_graph(x, opt.k);
    grande::save_edge_list(opt.out, g);
    std::cout << "wrote " << g.edges.size() << " edges for " << g.n << " nodes to " << opt.out
              << " (" << timer.seconds() << " s)\n";
    return 0;
}

int command_train(const Options& opt) {
    const Timer total;
    const TrainConfig cfg = to_train_config(opt);
    const grande::DenseMatrix x = grande::load_features(opt.features);
    const std::vector<int> labels = grande::load_labels(opt.labels);

    const Timer graph_timer;
    const grande::NeighborGraph g = build_graph(x, opt.k);
    const double graph_seconds = graph_timer.seconds();

    const Timer run_timer;
    const grande::MetricsReport report =
        grande::run_experiment(x, labels, g, cfg, opt.executions, opt.folds);
    const double run_seconds = run_timer.seconds();

    json doc;
    doc["config"] = config_echo("train", opt, cfg);
    doc["results"] = report_to_json(report);
    doc["timings"] = {{"graph_seconds", graph_seconds},
                      {"experiment_seconds", run_seconds},
                      {"total_seconds", total.seconds()}};
    write_result(opt.out, doc);
    std::cout << "mean accuracy " << report.mean << " +/- " << report.stddev << " over "
              << opt.executions << "x" << opt.folds << " cells -> " << opt.out << "\n";
    return 0;
}

int command_sweep(const Options& opt) {
    const Timer total;
    TrainConfig cfg = to_train_config(opt);
    cfg.degree_kind = DegreeKind::grande;  // a sigma sweep is a grande run by definition
    const std::vector<double> grid = parse_sigma_grid(opt.sigma_grid);

    const grande::DenseMatrix x = grande::load_features(opt.features);
    const std::vector<int> labels = grande::load_labels(opt.labels);

    const Timer graph_timer;
    const grande::NeighborGraph g = build_graph(x, opt.k);
    const double graph_seconds = graph_timer.seconds();

    const Timer run_timer;
    const grande::SweepResult sweep =
        grande::sigma_sweep(x, labels, g, cfg, grid, opt.executions, opt.folds);
    const double run_seconds = run_timer.seconds();

    json doc;
    doc["config"] = config_echo("sweep-sigma", opt, cfg);
    doc["config"]["sigma_grid"] = opt.sigma_grid;
    json per_sigma = json::array();
    for (std::size_t i = 0; i < sweep.sigmas.size(); ++i) {
        json entry;
        entry["sigma"] = sweep.sigmas[i];
        entry["results"] = report_to_json(sweep.reports[i]);
        per_sigma.push_back(std::move(entry));
    }
    doc["sweep"] = {{"sigmas", sweep.sigmas},
                    {"per_sigma", per_sigma},
                    {"best_sigma", sweep.sigmas[sweep.best_index]},
                    {"best_mean", sweep.reports[sweep.best_index].mean}};
    doc["timings"] = {{"graph_seconds", graph_seconds},
                      {"experiment_seconds", run_seconds},
                      {"total_seconds", total.seconds()}};
    write_result(opt.out, doc);
    std::cout << "best sigma " << sweep.sigmas[sweep.best_index] << " (mean "
              << sweep.reports[sweep.best_index].mean << ") -> " << opt.out << "\n";
    return 0;
}

int command_gen_synthetic(const Options& opt) {
    auto [x, labels] = grande::generate_blobs(opt.classes, opt.per_class, opt.dim, opt.separation,
                                              opt.noise, opt.seed);
    if (opt.features.size() >= 4 && opt.features.substr(opt.features.size() - 4) == ".csv")
        grande::save_features_csv(opt.features, x);
    else
        grande::save_features_binary(opt.features, x);
    grande::save_labels_csv(opt.labels, labels);

    if (!opt.out.empty()) {
        json doc;
        doc["config"] = {{"command", "gen-synthetic"}, {"classes", opt.classes},
                         {"per_class", opt.per_class}, {"dim", opt.dim},
                         {"separation", opt.separation}, {"noise", opt.noise},
                         {"seed", opt.seed}};
        doc["outputs"] = {{"features", opt.features}, {"labels", opt.labels}};
        write_result(opt.out, doc);
    }
    std::cout << "wrote " << x.rows << " points (" << opt.classes << " classes, dim " << opt.dim
              << ") to " << opt.features << " / " << opt.labels << "\n";
    return 0;
}

int command_evaluate(const Options& opt) {
    const Timer total;
    const TrainConfig cfg = to_train_config(opt);
    grande::validate_config(cfg);
    const grande::DenseMatrix x = grande::load_features(opt.features);
    const std::vector<int> labels = grande::load_labels(opt.labels);
    const grande::NeighborGraph g = build_graph(x, opt.k);

    // Single split: fold 0 of the first execution trains, the rest tests.
    const std::uint64_t exec_seed = grande::derive_seed(cfg.seed, 0);
    const grande::FoldPlan plan = grande::make_folds(x.rows, opt.folds, exec_seed);
    const std::vector<std::size_t> train_mask = plan.nodes_in_fold(0);
    const std::vector<std::size_t> test_mask = plan.nodes_not_in_fold(0);

    int classes = 0;
    for (int l : labels) classes = std::max(classes, l + 1);

    const std::uint64_t cell_seed = grande::derive_seed(exec_seed, 1);
    TrainConfig cell_cfg = cfg;
    cell_cfg.seed = grande::derive_seed(cell_seed, 1);
    grande::Rng init_rng(grande::derive_seed(cell_seed, 0));

    std::vector<double> trace;
    std::vector<int> preds;
    if (cfg.model == ModelKind::sgc) {
        auto model = grande::SgcModel::make(x.cols, static_cast<std::size_t>(classes),
                                            cfg.k_steps, init_rng);
        auto out = grande::train(model, x, g, labels, train_mask, cell_cfg);
        trace = std::move(out.loss_trace);
        preds = grande::predict(model, x, out.propagator);
    } else {
        auto model = grande::AppnpModel::make(x.cols, static_cast<std::size_t>(classes),
                                              cfg.hidden, cfg.k_steps, cfg.alpha, cfg.dropout,
                                              init_rng);
        auto out = grande::train(model, x, g, labels, train_mask, cell_cfg);
        trace = std::move(out.loss_trace);
        preds = grande::predict(model, x, out.propagator);
    }

    json doc;
    doc["config"] = config_echo("evaluate", opt, cfg);
    doc["results"] = {{"train_accuracy", grande::accuracy(preds, labels, train_mask)},
                      {"test_accuracy", grande::accuracy(preds, labels, test_mask)},
                      {"train_nodes", train_mask.size()},
                      {"test_nodes", test_mask.size()},
                      {"loss_trace", trace}};
    doc["timings"] = {{"total_seconds", total.seconds()}};
    write_result(opt.out, doc);
    std::cout << "test accuracy " << doc["results"]["test_accuracy"].get<double>() << " -> "
              << opt.out << "\n";
    return 0;
}

void add_model_flags(CLI::App* cmd, Options& opt) {
    cmd->add_option("--k", opt.k, "reciprocal kNN neighborhood size");
    cmd->add_option("--model", opt.model, "GNN model")
        ->check(CLI::IsMember({"sgc", "appnp"}));
    cmd->add_option("--degree", opt.degree, "degree used to normalize the adjacency")
        ->check(CLI::IsMember({"centrality", "grande"}));
    cmd->add_option("--sigma", opt.sigma, "Gaussian kernel width for grande");
    cmd->add_option("--K", opt.k_steps, "diffusion steps (default 2 for sgc, 10 for appnp)");
    cmd->add_option("--alpha", opt.alpha, "APPNP teleport probability");
    cmd->add_option("--hidden", opt.hidden, "APPNP hidden width (0 = single linear map)");
    cmd->add_option("--dropout", opt.dropout, "APPNP feature dropout rate");
    cmd->add_option("--lr", opt.lr, "Adam learning rate");
    cmd->add_option("--epochs", opt.epochs, "training epochs");
    cmd->add_option("--folds", opt.folds, "fold count");
    cmd->add_option("--executions", opt.executions, "repetitions of the fold protocol");
    cmd->add_option("--seed", opt.seed, "top-level seed");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semi-supervised node classification with diffusion GNNs and "
                 "Gaussian neighborhood degrees"};
    app.require_subcommand(1);
    Options opt;

    CLI::App* build = app.add_subcommand("build-graph", "write the reciprocal kNN edge list");
    build->add_option("--features", opt.features, "feature file (csv or binary)")->required();
    build->add_option("--k", opt.k, "neighborhood size");
    build->add_option("--out", opt.out, "edge list output path")->required();

    CLI::App* train = app.add_subcommand("train", "run the fold-based experiment");
    train->add_option("--features", opt.features)->required();
    train->add_option("--labels", opt.labels)->required();
    train->add_option("--out", opt.out, "result file (json)")->required();
    add_model_flags(train, opt);

    CLI::App* sweep = app.add_subcommand("sweep-sigma", "run the experiment over a sigma grid");
    sweep->add_option("--features", opt.features)->required();
    sweep->add_option("--labels", opt.labels)->required();
    sweep->add_option("--out", opt.out, "result file (json)")->required();
    sweep->add_option("--sigma-grid", opt.sigma_grid, "grid as lo:hi:step");
    add_model_flags(sweep, opt);

    CLI::App* gen = app.add_subcommand("gen-synthetic", "generate Gaussian blob features/labels");
    gen->add_option("--classes", opt.classes);
    gen->add_option("--per-class", opt.per_class);
    gen->add_option("--dim", opt.dim);
    gen->add_option("--separation", opt.separation);
    gen->add_option("--noise", opt.noise);
    gen->add_option("--seed", opt.seed);
    gen->add_option("--features", opt.features, "feature output (binary, or csv by extension)")
        ->required();
    gen->add_option("--labels", opt.labels, "label output (csv)")->required();
    gen->add_option("--out", opt.out, "optional summary file (json)");

    CLI::App* evaluate = app.add_subcommand("evaluate", "train one split and report accuracy");
    evaluate->add_option("--features", opt.features)->required();
    evaluate->add_option("--labels", opt.labels)->required();
    evaluate->add_option("--out", opt.out, "result file (json)")->required();
    add_model_flags(evaluate, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help() << "\n";
        return 2;
    }

    try {
        if (build->parsed()) return command_build_graph(opt);
        if (train->parsed()) return command_train(opt);
        if (sweep->parsed()) return command_sweep(opt);
        if (gen->parsed()) return command_gen_synthetic(opt);
        if (evaluate->parsed()) return command_evaluate(opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
