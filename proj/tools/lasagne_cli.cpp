#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lasagne/alias.hpp"
#include "lasagne/appr.hpp"
#include "lasagne/common.hpp"
#include "lasagne/diagnostics.hpp"
#include "lasagne/eval.hpp"
#include "lasagne/graph.hpp"
#include "lasagne/sgns.hpp"
#include "lasagne/walks.hpp"

namespace {

using nlohmann::json;
using namespace lasagne;

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw DataError("cannot parse number '" + tok + "'");
        }
    }
    if (out.empty()) throw DataError("empty numeric list");
    return out;
}

// "emb.txt" + suffix "alpha0.25" -> "emb.alpha0.25.txt"
std::string suffixed_path(const std::string& path, const std::string& suffix) {
    const auto slash = path.find_last_of('/');
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + "." + suffix;
    return path.substr(0, dot) + "." + suffix + path.substr(dot);
}

std::string format_alpha(double alpha) {
    std::ostringstream os;
    os << "alpha" << alpha;
    return os.str();
}

json file_stamp(const std::string& path) {
    return json{{"path", path}, {"fnv1a64", hex64(fnv1a64_file(path))}};
}

void write_manifest(const std::string& path, const json& manifest) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write manifest: " + path);
    out << manifest.dump(2) << "\n";
}

struct GraphArgs {
    std::string edges_path;
    bool directed_input = false;
    bool use_lcc = false;

    CsrGraph load(json* manifest) const {
        LoadReport report;
        auto g = load_edge_list(edges_path, directed_input, &report);
        if (report.self_loops_dropped || report.duplicate_edges_dropped)
            std::cerr << "note: dropped " << report.self_loops_dropped << " self loops, "
                      << report.duplicate_edges_dropped << " duplicate edges\n";
        if (use_lcc) {
            auto lcc = largest_connected_component(g);
            std::cerr << "note: largest connected component keeps " << lcc.graph.num_nodes()
                      << " of " << g.num_nodes() << " nodes\n";
            g = std::move(lcc.graph);
        }
        if (manifest) {
            (*manifest)["inputs"]["edges"] = file_stamp(edges_path);
            (*manifest)["graph"] = {{"nodes", g.num_nodes()},
                                    {"edges", g.num_edges()},
                                    {"self_loops_dropped", report.self_loops_dropped},
                                    {"duplicates_dropped", report.duplicate_edges_dropped},
                                    {"lcc", use_lcc}};
        }
        return g;
    }

    void attach(CLI::App* cmd) {
        cmd->add_option("--edges", edges_path, "Edge list file")->required();
        cmd->add_flag("--directed-input", directed_input,
                      "Input lists directed arcs; symmetrize without duplicate warnings");
        cmd->add_flag("--lcc", use_lcc, "Restrict to the largest connected component");
    }
};

struct TrainArgs {
    TrainConfig cfg;
    std::string alpha_list = "0.2";
    bool binary = false;

    void attach(CLI::App* cmd, bool with_appr_params) {
        if (with_appr_params) {
            cmd->add_option("--alpha", alpha_list,
                            "Teleportation parameter, comma-separated values sweep");
            cmd->add_option("--delta", cfg.delta, "Push stopping threshold")
                ->capture_default_str();
        }
        cmd->add_option("--dim", cfg.dim, "Embedding dimension")->capture_default_str();
        cmd->add_option("--negatives", cfg.negatives_k, "Negative samples per pair")
            ->capture_default_str();
        cmd->add_option("--batch-size", cfg.batch_size, "Pairs per batch (0: 10*|V|)");
        cmd->add_option("--max-batches", cfg.max_batches,
                        "Batch count (0: training budget / batch size)");
        cmd->add_option("--lr-initial", cfg.lr_initial, "Initial learning rate")
            ->capture_default_str();
        cmd->add_option("--lr-final", cfg.lr_final, "Final learning rate")->capture_default_str();
        cmd->add_option("--noise-exponent", cfg.noise_exponent,
                        "Negative-sampling degree exponent (0: uniform)")
            ->capture_default_str();
        cmd->add_option("--seed", cfg.rng_seed, "RNG seed")->capture_default_str();
        cmd->add_option("--walk-len", cfg.budget_walk_len, "Budget parameter: walk length")
            ->capture_default_str();
        cmd->add_option("--walks-per-node", cfg.budget_walks_per_node,
                        "Budget parameter: walks per node")
            ->capture_default_str();
        cmd->add_option("--window", cfg.budget_window, "Budget parameter: window size")
            ->capture_default_str();
        cmd->add_flag("--convergence-check", cfg.convergence_check,
                      "Stop early on a loss plateau");
        cmd->add_flag("--binary", binary, "Write the binary embedding format");
    }

    json to_json() const {
        return json{{"dim", cfg.dim},
                    {"negatives", cfg.negatives_k},
                    {"batch_size", cfg.batch_size},
                    {"max_batches", cfg.max_batches},
                    {"lr_initial", cfg.lr_initial},
                    {"lr_final", cfg.lr_final},
                    {"noise_exponent", cfg.noise_exponent},
                    {"rng_seed", cfg.rng_seed},
                    {"threads", cfg.threads},
                    {"convergence_check", cfg.convergence_check},
                    {"budget_walk_len", cfg.budget_walk_len},
                    {"budget_walks_per_node", cfg.budget_walks_per_node},
                    {"budget_window", cfg.budget_window},
                    {"binary", binary}};
    }
};

Eigen::MatrixXd train_embeddings(const CsrGraph& g, const std::vector<ApprVector>& apprs,
                                 const TrainConfig& cfg, TrainLog* log = nullptr) {
    const auto emb = train<float>(g, apprs, cfg, log);
    return emb.input_vecs.cast<double>();
}

int cmd_appr(const GraphArgs& gargs, const std::string& alpha_list, double delta, int threads,
             const std::string& out, const std::string& manifest_path) {
    json manifest{{"subcommand", "appr"}};
    const auto g = gargs.load(&manifest);
    const auto alphas = parse_double_list(alpha_list);
    manifest["parameters"] = {{"alpha", alphas}, {"delta", delta}, {"threads", threads}};

    for (double alpha : alphas) {
        ApprConfig cfg;
        cfg.alpha = alpha;
        cfg.delta = delta;
        const auto path = alphas.size() == 1 ? out : suffixed_path(out, format_alpha(alpha));
        const auto batch = compute_all_appr(g, cfg, threads);
        save_appr(path, batch, cfg, g);
        std::uint64_t pushes = 0;
        for (const auto& v : batch.vectors) pushes += v.num_pushes;
        std::cerr << "appr alpha=" << alpha << ": " << batch.vectors.size() << " vectors, "
                  << batch.skipped.size() << " isolated nodes skipped, " << pushes
                  << " pushes -> " << path << "\n";
        manifest["outputs"][format_alpha(alpha)] = file_stamp(path);
    }
    write_manifest(manifest_path.empty() ? out + ".manifest.json" : manifest_path, manifest);
    return 0;
}

int cmd_train(const GraphArgs& gargs, const std::string& appr_path, TrainArgs targs, int threads,
              const std::string& out, const std::string& manifest_path) {
    json manifest{{"subcommand", "train"}};
    const auto g = gargs.load(&manifest);
    const auto file = load_appr(appr_path, g);
    manifest["inputs"]["appr"] = file_stamp(appr_path);
    targs.cfg.alpha = file.alpha;
    targs.cfg.delta = file.delta;
    targs.cfg.threads = threads;
    manifest["parameters"] = targs.to_json();
    manifest["parameters"]["alpha"] = file.alpha;
    manifest["parameters"]["delta"] = file.delta;

    TrainLog log;
    const auto emb = train_embeddings(g, file.batch.vectors, targs.cfg, &log);
    save_embeddings(out, emb, g, targs.binary);
    std::cerr << "train: " << log.batches_run << " batches, " << log.steps << " pairs, final loss "
              << (log.batch_mean_loss.empty() ? 0.0 : log.batch_mean_loss.back()) << " -> " << out
              << "\n";
    manifest["outputs"]["embedding"] = file_stamp(out);
    manifest["training"] = {{"batches_run", log.batches_run},
                            {"pairs_processed", log.steps},
                            {"stopped_on_plateau", log.stopped_on_plateau}};
    write_manifest(manifest_path.empty() ? out + ".manifest.json" : manifest_path, manifest);
    return 0;
}

int cmd_embed(const GraphArgs& gargs, TrainArgs targs, const std::string& method, int threads,
              const std::string& out, const std::string& walk_dump,
              const std::string& manifest_path) {
    json manifest{{"subcommand", "embed"}};
    const auto g = gargs.load(&manifest);
    targs.cfg.threads = threads;
    manifest["parameters"] = targs.to_json();
    manifest["parameters"]["method"] = method;

    if (method == "walks") {
        WalkConfig wcfg;
        wcfg.walk_len = targs.cfg.budget_walk_len;
        wcfg.walks_per_node = targs.cfg.budget_walks_per_node;
        wcfg.window = targs.cfg.budget_window;
        wcfg.rng_seed = targs.cfg.rng_seed;
        auto pairs = walk_context_pairs(g, wcfg);
        if (!walk_dump.empty()) {
            dump_walks(walk_dump, simulate_walks(g, wcfg), g);
            manifest["outputs"]["walks"] = file_stamp(walk_dump);
        }
        TrainLog log;
        const auto emb = train_on_pairs<float>(g, std::move(pairs), targs.cfg, &log);
        save_embeddings(out, emb.input_vecs.cast<double>().eval(), g, targs.binary);
        std::cerr << "embed(walks): " << log.steps << " pairs -> " << out << "\n";
        manifest["outputs"]["embedding"] = file_stamp(out);
        write_manifest(manifest_path.empty() ? out + ".manifest.json" : manifest_path, manifest);
        return 0;
    }
    if (method != "appr") throw DataError("unknown embedding method: " + method);

    const auto alphas = parse_double_list(targs.alpha_list);
    manifest["parameters"]["alpha"] = alphas;
    manifest["parameters"]["delta"] = targs.cfg.delta;
    for (double alpha : alphas) {
        ApprConfig acfg;
        acfg.alpha = alpha;
        acfg.delta = targs.cfg.delta;
        auto cfg = targs.cfg;
        cfg.alpha = alpha;
        const auto batch = compute_all_appr(g, acfg, threads);
        TrainLog log;
        const auto emb = train_embeddings(g, batch.vectors, cfg, &log);
        const auto path = alphas.size() == 1 ? out : suffixed_path(out, format_alpha(alpha));
        save_embeddings(path, emb, g, targs.binary);
        std::cerr << "embed alpha=" << alpha << ": " << log.batches_run << " batches, "
                  << log.steps << " pairs -> " << path << "\n";
        manifest["outputs"][format_alpha(alpha)] = file_stamp(path);
    }
    write_manifest(manifest_path.empty() ? out + ".manifest.json" : manifest_path, manifest);
    return 0;
}

int cmd_eval_multilabel(const GraphArgs& gargs, const std::string& labels_path,
                        const std::string& emb_path, const std::string& protocol, int folds,
                        double train_frac, int reps, double l2, bool normalize,
                        std::uint64_t seed, const std::string& out,
                        const std::string& manifest_path) {
    json manifest{{"subcommand", "eval-multilabel"}};
    const auto g = gargs.load(&manifest);
    const auto labels = LabelSet::load(labels_path, g);
    const auto emb = load_embeddings(emb_path, g);
    manifest["inputs"]["labels"] = file_stamp(labels_path);
    manifest["inputs"]["embedding"] = file_stamp(emb_path);
    manifest["parameters"] = {{"protocol", protocol}, {"folds", folds},
                              {"train_fraction", train_frac}, {"repetitions", reps},
                              {"l2", l2},  {"normalize", normalize},
                              {"rng_seed", seed}};

    EvalReport report;
    if (protocol == "realistic")
        report = multilabel_realistic(emb, labels, folds, seed, l2, normalize);
    else if (protocol == "former")
        report = multilabel_former(emb, labels, train_frac, reps, seed, l2, normalize);
    else
        throw DataError("unknown protocol: " + protocol);

    write_report_text(std::cout, report, &labels);
    write_report_kv(out, report);
    manifest["outputs"]["report"] = file_stamp(out);
    manifest["results"] = {{"macro_f1", report.macro_f1}, {"micro_f1", report.micro_f1}};
    write_manifest(manifest_path.empty() ? out + ".manifest.json" : manifest_path, manifest);
    return 0;
}

int cmd_eval_linkpred(const GraphArgs& gargs, TrainArgs targs, double holdout,
                      const std::string& ops_csv, bool no_jaccard, int knn_k, double l2,
                      std::uint64_t split_seed, int threads, const std::string& out,
                      const std::string& manifest_path) {
    json manifest{{"subcommand", "eval-linkpred"}};
    const auto g = gargs.load(&manifest);
    targs.cfg.threads = threads;
    const auto alphas = parse_double_list(targs.alpha_list);
    if (alphas.size() != 1) throw DataError("eval-linkpred expects a single alpha");
    targs.cfg.alpha = alphas[0];

    std::vector<EdgeOp> ops;
    {
        std::stringstream ss(ops_csv);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) ops.push_back(edge_op_from_string(tok));
    }
    manifest["parameters"] = targs.to_json();
    manifest["parameters"]["alpha"] = targs.cfg.alpha;
    manifest["parameters"]["delta"] = targs.cfg.delta;
    manifest["parameters"]["holdout"] = holdout;
    manifest["parameters"]["ops"] = ops_csv;
    manifest["parameters"]["jaccard"] = !no_jaccard;
    manifest["parameters"]["knn_k"] = knn_k;
    manifest["parameters"]["l2"] = l2;
    manifest["parameters"]["split_seed"] = split_seed;

    auto embed_fn = [&](const CsrGraph& residual) {
        ApprConfig acfg;
        acfg.alpha = targs.cfg.alpha;
        acfg.delta = targs.cfg.delta;
        const auto batch = compute_all_appr(residual, acfg, threads);
        return train_embeddings(residual, batch.vectors, targs.cfg);
    };
    const auto report = linkpred_eval(g, embed_fn, ops, !no_jaccard, holdout, split_seed, knn_k, l2);

    write_report_text(std::cout, report, nullptr);
    write_report_kv(out, report);
    manifest["outputs"]["report"] = file_stamp(out);
    for (const auto& [name, auc] : report.op_auc) manifest["results"][name] = auc;
    write_manifest(manifest_path.empty() ? out + ".manifest.json" : manifest_path, manifest);
    return 0;
}

int cmd_diag(const GraphArgs& gargs, const std::string& op, const std::string& source_name,
             DiagnosticsConfig dcfg, const std::string& labels_path, const std::string& report_a,
             const std::string& report_b, const std::string& out,
             const std::string& manifest_path) {
    json manifest{{"subcommand", "diag"}};
    const auto g = gargs.load(&manifest);
    manifest["parameters"] = {{"op", op},
                              {"source", source_name},
                              {"alpha", dcfg.appr.alpha},
                              {"delta", dcfg.appr.delta},
                              {"walk_len", dcfg.walks.walk_len},
                              {"walks_per_node", dcfg.walks.walks_per_node},
                              {"window", dcfg.walks.window},
                              {"samples_per_bucket", dcfg.samples_per_bucket},
                              {"contexts_per_seed", dcfg.contexts_per_seed},
                              {"rng_seed", dcfg.rng_seed}};

    ConfigPairs config{{"op", op},
                       {"source", source_name},
                       {"alpha", std::to_string(dcfg.appr.alpha)},
                       {"delta", std::to_string(dcfg.appr.delta)},
                       {"walk_len", std::to_string(dcfg.walks.walk_len)},
                       {"walks_per_node", std::to_string(dcfg.walks.walks_per_node)},
                       {"window", std::to_string(dcfg.walks.window)},
                       {"rng_seed", std::to_string(dcfg.rng_seed)}};

    if (op == "hop-profile") {
        const auto src = context_source_from_string(source_name);
        const auto profile = hop_distance_profile(g, src, dcfg);
        write_hop_profile_csv(out, profile, config);
    } else if (op == "instances") {
        const auto src = context_source_from_string(source_name);
        const auto profile = instances_per_degree(g, src, dcfg);
        write_instances_csv(out, profile, config);
    } else if (op == "kcore") {
        if (labels_path.empty()) throw DataError("diag kcore requires --labels");
        const auto labels = LabelSet::load(labels_path, g);
        manifest["inputs"]["labels"] = file_stamp(labels_path);
        write_kcore_csv(out, kcore_class_profile(g, labels), config);
    } else if (op == "f1-delta") {
        if (labels_path.empty() || report_a.empty() || report_b.empty())
            throw DataError("diag f1-delta requires --labels, --report-a, --report-b");
        const auto labels = LabelSet::load(labels_path, g);
        const auto a = load_report_kv(report_a);
        const auto b = load_report_kv(report_b);
        manifest["inputs"]["labels"] = file_stamp(labels_path);
        manifest["inputs"]["report_a"] = file_stamp(report_a);
        manifest["inputs"]["report_b"] = file_stamp(report_b);
        write_f1_delta_csv(out, per_class_f1_delta(a, b, labels), config);
    } else {
        throw DataError("unknown diag op: " + op);
    }
    manifest["outputs"]["csv"] = file_stamp(out);
    write_manifest(manifest_path.empty() ? out + ".manifest.json" : manifest_path, manifest);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Locality-aware node embeddings: personalized-PageRank neighborhoods "
                 "trained with skip-gram negative sampling"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a config file (flags take precedence)");

    int threads = 1;
    app.add_option("--threads", threads, "Worker thread cap (1 = deterministic)")
        ->capture_default_str();

    int rc = 0;

    // appr
    auto* appr_cmd = app.add_subcommand("appr", "Compute APPR vectors and write the sidecar file");
    GraphArgs appr_graph;
    appr_graph.attach(appr_cmd);
    std::string appr_alpha = "0.2";
    double appr_delta = 1e-4;
    std::string appr_out, appr_manifest;
    appr_cmd->add_option("--alpha", appr_alpha, "Teleportation parameter (comma list sweeps)")
        ->capture_default_str();
    appr_cmd->add_option("--delta", appr_delta, "Push stopping threshold")->capture_default_str();
    appr_cmd->add_option("--out", appr_out, "Output sidecar path")->required();
    appr_cmd->add_option("--manifest", appr_manifest, "Manifest path (default <out>.manifest.json)");
    appr_cmd->callback(
        [&] { rc = cmd_appr(appr_graph, appr_alpha, appr_delta, threads, appr_out, appr_manifest); });

    // train
    auto* train_cmd = app.add_subcommand("train", "Train embeddings from an APPR sidecar file");
    GraphArgs train_graph;
    train_graph.attach(train_cmd);
    TrainArgs train_args;
    train_args.attach(train_cmd, false);
    std::string train_appr, train_out, train_manifest;
    train_cmd->add_option("--appr", train_appr, "APPR sidecar file")->required();
    train_cmd->add_option("--out", train_out, "Output embedding path")->required();
    train_cmd->add_option("--manifest", train_manifest, "Manifest path");
    train_cmd->callback([&] {
        rc = cmd_train(train_graph, train_appr, train_args, threads, train_out, train_manifest);
    });

    // embed
    auto* embed_cmd = app.add_subcommand("embed", "Fused pipeline: APPR + training");
    GraphArgs embed_graph;
    embed_graph.attach(embed_cmd);
    TrainArgs embed_args;
    embed_args.attach(embed_cmd, true);
    std::string embed_method = "appr", embed_out, embed_walk_dump, embed_manifest;
    embed_cmd->add_option("--method", embed_method, "Context source: appr or walks")
        ->capture_default_str();
    embed_cmd->add_option("--out", embed_out, "Output embedding path")->required();
    embed_cmd->add_option("--dump-walks", embed_walk_dump, "Also dump simulated walks (walks method)");
    embed_cmd->add_option("--manifest", embed_manifest, "Manifest path");
    embed_cmd->callback([&] {
        rc = cmd_embed(embed_graph, embed_args, embed_method, threads, embed_out, embed_walk_dump,
                       embed_manifest);
    });

    // eval-multilabel
    auto* ml_cmd = app.add_subcommand("eval-multilabel", "Multi-label node classification");
    GraphArgs ml_graph;
    ml_graph.attach(ml_cmd);
    std::string ml_labels, ml_emb, ml_protocol = "realistic", ml_out, ml_manifest;
    int ml_folds = 10, ml_reps = 10;
    double ml_frac = 0.9, ml_l2 = 1.0;
    bool ml_normalize = false;
    std::uint64_t ml_seed = 1;
    ml_cmd->add_option("--labels", ml_labels, "Label file")->required();
    ml_cmd->add_option("--emb", ml_emb, "Embedding file")->required();
    ml_cmd->add_option("--protocol", ml_protocol, "realistic or former")->capture_default_str();
    ml_cmd->add_option("--folds", ml_folds, "CV folds (realistic)")->capture_default_str();
    ml_cmd->add_option("--train-frac", ml_frac, "Training fraction (former)")
        ->capture_default_str();
    ml_cmd->add_option("--reps", ml_reps, "Repetitions (former)")->capture_default_str();
    ml_cmd->add_option("--l2", ml_l2, "LR regularization")->capture_default_str();
    ml_cmd->add_flag("--normalize", ml_normalize, "L2-normalize embeddings first");
    ml_cmd->add_option("--seed", ml_seed, "RNG seed")->capture_default_str();
    ml_cmd->add_option("--out", ml_out, "Report output path")->required();
    ml_cmd->add_option("--manifest", ml_manifest, "Manifest path");
    ml_cmd->callback([&] {
        rc = cmd_eval_multilabel(ml_graph, ml_labels, ml_emb, ml_protocol, ml_folds, ml_frac,
                                 ml_reps, ml_l2, ml_normalize, ml_seed, ml_out, ml_manifest);
    });

    // eval-linkpred
    auto* lp_cmd = app.add_subcommand("eval-linkpred", "Link prediction with edge operators");
    GraphArgs lp_graph;
    lp_graph.attach(lp_cmd);
    TrainArgs lp_args;
    lp_args.attach(lp_cmd, true);
    std::string lp_ops = "average,hadamard,l1,l2", lp_out, lp_manifest;
    bool lp_nojac = false;
    int lp_knn = 50;
    double lp_holdout = 0.5, lp_l2 = 1.0;
    std::uint64_t lp_seed = 1;
    lp_cmd->add_option("--holdout", lp_holdout, "Edge fraction to remove")->capture_default_str();
    lp_cmd->add_option("--ops", lp_ops, "Edge operators, comma separated")->capture_default_str();
    lp_cmd->add_flag("--no-jaccard", lp_nojac, "Skip the kNN Jaccard scorer");
    lp_cmd->add_option("--knn-k", lp_knn, "Neighborhood size for the Jaccard scorer")
        ->capture_default_str();
    lp_cmd->add_option("--l2", lp_l2, "LR regularization")->capture_default_str();
    lp_cmd->add_option("--split-seed", lp_seed, "Split/negative-sampling seed")
        ->capture_default_str();
    lp_cmd->add_option("--out", lp_out, "Report output path")->required();
    lp_cmd->add_option("--manifest", lp_manifest, "Manifest path");
    lp_cmd->callback([&] {
        rc = cmd_eval_linkpred(lp_graph, lp_args, lp_holdout, lp_ops, lp_nojac, lp_knn, lp_l2,
                               lp_seed, threads, lp_out, lp_manifest);
    });

    // diag
    auto* diag_cmd = app.add_subcommand("diag", "Structural diagnostics tables");
    GraphArgs diag_graph;
    diag_graph.attach(diag_cmd);
    DiagnosticsConfig dcfg;
    std::string diag_op, diag_source = "appr", diag_labels, diag_ra, diag_rb, diag_out,
                         diag_manifest;
    diag_cmd->add_option("--op", diag_op, "hop-profile | instances | kcore | f1-delta")
        ->required();
    diag_cmd->add_option("--source", diag_source, "Context source: appr or walks")
        ->capture_default_str();
    diag_cmd->add_option("--alpha", dcfg.appr.alpha, "APPR teleportation")->capture_default_str();
    diag_cmd->add_option("--delta", dcfg.appr.delta, "APPR stopping threshold")
        ->capture_default_str();
    diag_cmd->add_option("--walk-len", dcfg.walks.walk_len, "Walk length")->capture_default_str();
    diag_cmd->add_option("--walks-per-node", dcfg.walks.walks_per_node, "Walks per node")
        ->capture_default_str();
    diag_cmd->add_option("--window", dcfg.walks.window, "Window size")->capture_default_str();
    diag_cmd->add_option("--samples-per-bucket", dcfg.samples_per_bucket,
                         "Seeds sampled per degree bucket")
        ->capture_default_str();
    diag_cmd->add_option("--contexts-per-seed", dcfg.contexts_per_seed,
                         "Context draws per seed (appr hop profile)")
        ->capture_default_str();
    diag_cmd->add_option("--pairs-per-node", dcfg.appr_pairs_per_node,
                         "Per-node pair budget for instances (0: formula default)");
    diag_cmd->add_option("--seed", dcfg.rng_seed, "RNG seed")->capture_default_str();
    diag_cmd->add_option("--labels", diag_labels, "Label file (kcore, f1-delta)");
    diag_cmd->add_option("--report-a", diag_ra, "First report (f1-delta)");
    diag_cmd->add_option("--report-b", diag_rb, "Second report (f1-delta)");
    diag_cmd->add_option("--out", diag_out, "CSV output path")->required();
    diag_cmd->add_option("--manifest", diag_manifest, "Manifest path");
    diag_cmd->callback([&] {
        dcfg.walks.rng_seed = dcfg.rng_seed;
        rc = cmd_diag(diag_graph, diag_op, diag_source, dcfg, diag_labels, diag_ra, diag_rb,
                      diag_out, diag_manifest);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return rc;
}
