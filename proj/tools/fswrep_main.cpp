// Command-line surface for training, evaluating and exporting
// function-specific word vector spaces.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "fswrep/fswrep.hpp"

namespace fs = std::filesystem;
using namespace fswrep;

namespace {

struct GlobalOpts {
    std::string out = "fswrep_out";
    std::uint64_t seed = 1;
};

struct TrainOpts {
    std::string corpus;
    std::string groups = "S,V,O";
    std::int64_t min_count = 50;
    TrainConfig config;
    std::string regime = "sync";
    std::string params = "shared";
    bool lax_tokens = false;
};

TrainRegime parse_regime(const std::string& regime, const std::string& params) {
    return {regime == "sync", params == "shared"};
}

void write_resolved_config(CLI::App& app, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    std::ofstream out(out_dir / "config.resolved.ini");
    if (!out) throw IoError("cannot write resolved config");
    out << app.config_to_str(true, false);
}

void add_train_options(CLI::App* cmd, TrainOpts& opts, bool corpus_required = true) {
    auto* corpus = cmd->add_option("--corpus", opts.corpus, "Tuple corpus file");
    if (corpus_required) corpus->required();
    cmd->add_option("--groups", opts.groups, "Comma-separated group labels")
        ->capture_default_str();
    cmd->add_option("--min-count", opts.min_count, "Frequency threshold for the vocabulary")
        ->capture_default_str();
    cmd->add_option("--batch-size", opts.config.batch_size)->capture_default_str();
    cmd->add_option("--lr", opts.config.learning_rate, "Adam learning rate")
        ->capture_default_str();
    cmd->add_option("--clip-norm", opts.config.clip_norm, "Global gradient norm cap")
        ->capture_default_str();
    cmd->add_option("--dim", opts.config.dim, "Vector dimensionality")->capture_default_str();
    cmd->add_option("--epochs", opts.config.epochs)->capture_default_str();
    cmd->add_option("--regime", opts.regime, "Training regime")
        ->check(CLI::IsMember({"sync", "async"}))
        ->capture_default_str();
    cmd->add_option("--params", opts.params, "Parameter sharing")
        ->check(CLI::IsMember({"shared", "sep"}))
        ->capture_default_str();
    cmd->add_flag("--lax-tokens", opts.lax_tokens,
                  "Accept tokens with non-alphanumeric characters");
}

struct LoadedCorpus {
    GroupSchema schema;
    Vocabulary vocab;
    TupleDataset dataset;
    std::size_t rejected = 0;
};

LoadedCorpus prepare_corpus(const TrainOpts& opts) {
    LoadedCorpus lc;
    lc.schema = GroupSchema::parse(opts.groups);
    LoadOptions load_opts;
    load_opts.strict_tokens = !opts.lax_tokens;
    auto loaded = load_tuples(opts.corpus, lc.schema, load_opts);
    lc.rejected = loaded.rejected.size();
    lc.vocab = build_vocab(loaded.tuples, lc.schema, opts.min_count);
    lc.dataset = encode(loaded.tuples, lc.vocab);
    return lc;
}

int cmd_train(CLI::App& app, const GlobalOpts& global, TrainOpts& opts) {
    opts.config.seed = global.seed;
    opts.config.regime = parse_regime(opts.regime, opts.params);
    auto lc = prepare_corpus(opts);

    std::cout << "corpus: " << lc.dataset.records.size() << " records ("
              << lc.rejected << " lines rejected, " << lc.dataset.dropped
              << " dropped by the frequency filter)\n";
    for (std::size_t g = 0; g < lc.schema.arity(); ++g) {
        std::cout << "vocab " << lc.schema.name(g) << ": " << lc.vocab.size(g)
                  << " words\n";
    }

    auto model = init_model(lc.schema, lc.vocab, opts.config.dim, opts.config.seed,
                            opts.config.regime);
    auto adam = make_adam_state(model);
    auto result = train(model, adam, lc.dataset, opts.config);

    fs::path out_dir(global.out);
    fs::create_directories(out_dir);
    save_model(model, adam, opts.config, out_dir / "checkpoint.fsw");
    dump_vocab(lc.vocab, lc.schema, out_dir);
    write_loss_trace(result.trace, out_dir / "loss_trace.csv");
    write_resolved_config(app, out_dir);

    if (!result.epoch_mean_loss.empty()) {
        std::cout << "joint loss: first epoch " << result.epoch_mean_loss.front()
                  << ", last epoch " << result.epoch_mean_loss.back() << "\n";
    }
    std::cout << "checkpoint: " << (out_dir / "checkpoint.fsw").string() << "\n";
    return 0;
}

std::vector<std::size_t> resolve_roles(const JointModel& model, const std::string& roles) {
    std::vector<std::size_t> out;
    if (roles.empty()) {
        out.resize(model.num_groups());
        std::iota(out.begin(), out.end(), std::size_t{0});
        return out;
    }
    for (const auto& label : GroupSchema::parse(roles).names()) {
        out.push_back(model.schema.index_of(label));
    }
    return out;
}

void finish_report(const EvalReport& report, const GlobalOpts& global, CLI::App& app) {
    fs::path out_dir(global.out);
    fs::create_directories(out_dir);
    std::vector<EvalReport> rows{report};
    write_reports_csv(rows, out_dir / "report.csv");
    write_resolved_config(app, out_dir);
    std::cout << report.dataset << " " << report.metric << " = " << report.value
              << " (items " << report.items << ", skipped " << report.skipped
              << ", coverage " << report.coverage << ")\n";
}

int cmd_eval_pseudo(CLI::App& app, const GlobalOpts& global, const std::string& checkpoint,
                    const std::string& corpus, const std::string& roles, bool lax_tokens) {
    auto ck = load_model(checkpoint);
    LoadOptions load_opts;
    load_opts.strict_tokens = !lax_tokens;
    auto loaded = load_tuples(corpus, ck.model.schema, load_opts);
    auto test = encode(loaded.tuples, ck.model.vocab);
    if (test.records.empty()) {
        throw DataError("no test records survive vocabulary encoding");
    }
    std::cout << "test records: " << test.records.size() << " (" << test.dropped
              << " dropped as out-of-vocabulary)\n";
    auto role_idx = resolve_roles(ck.model, roles);
    auto report = pseudo_disambiguation(ck.model, test, role_idx, global.seed, nullptr,
                                        true, fs::path(corpus).filename().string());
    finish_report(report, global, app);
    return 0;
}

int cmd_eval_event_sim(CLI::App& app, const GlobalOpts& global, const std::string& checkpoint,
                       const std::string& dataset, const std::string& composition,
                       bool no_bias) {
    auto ck = load_model(checkpoint);
    auto ds = load_similarity_dataset(dataset, fs::path(dataset).filename().string());
    auto kind = parse_composition(composition);
    auto report = event_similarity_eval(ck.model, ds, kind, !no_bias);
    finish_report(report, global, app);
    return 0;
}

int cmd_eval_thematic(CLI::App& app, const GlobalOpts& global, const std::string& checkpoint,
                      const std::string& dataset, const std::string& role,
                      const ThematicGroups& groups) {
    auto ck = load_model(checkpoint);
    auto ds = load_thematic_dataset(dataset, fs::path(dataset).filename().string());
    if (role != "both") {
        ThematicFitDataset filtered;
        filtered.name = ds.name + "/" + role;
        auto want = role == "agent" ? ThematicRole::Agent : ThematicRole::Patient;
        for (const auto& item : ds.items) {
            if (item.role == want) filtered.items.push_back(item);
        }
        ds = std::move(filtered);
    }
    auto report = thematic_fit_eval(ck.model, ds, groups);
    finish_report(report, global, app);
    return 0;
}

int cmd_nn(const std::string& checkpoint, const std::string& word, const std::string& group,
           std::string target_group, std::size_t k) {
    auto ck = load_model(checkpoint);
    if (target_group.empty()) target_group = group;
    auto neighbors = nearest_neighbors(ck.model, word, group, target_group, k);
    for (const auto& n : neighbors) {
        std::cout << n.word << '\t' << n.similarity << '\n';
    }
    return 0;
}

int cmd_export(CLI::App& app, const GlobalOpts& global, const std::string& checkpoint) {
    auto ck = load_model(checkpoint);
    auto files = export_vectors(ck.model, global.out);
    write_resolved_config(app, global.out);
    for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
    return 0;
}

struct DemoOpts {
    std::size_t items = 2000;
    std::size_t clusters = 3;
    std::size_t epochs = 24;
    std::size_t dim = 25;
    std::size_t batch_size = 24;
    bool balanced = false;
};

int cmd_demo(CLI::App& app, const GlobalOpts& global, const DemoOpts& opts) {
    auto assignment =
        gen_synthetic_assignment(opts.items, opts.clusters, global.seed, opts.balanced);
    auto vocab = build_vocab(assignment.pairs, assignment.schema, 1);
    auto dataset = encode(assignment.pairs, vocab);

    TrainConfig config;
    config.dim = opts.dim;
    config.epochs = opts.epochs;
    config.seed = global.seed;
    config.batch_size = opts.batch_size;

    struct Variant {
        std::string name;
        std::vector<std::size_t> filter;
    };
    JointModel probe = init_model(assignment.schema, vocab, 1, 1);
    const std::vector<Variant> variants{
        {"n-to-1", {probe.subnet_index(0, 1)}},
        {"1-to-n", {probe.subnet_index(1, 0)}},
        {"multidirectional", {}},
    };

    fs::path out_dir(global.out);
    fs::create_directories(out_dir);
    std::ofstream purity_csv(out_dir / "purity.csv");
    purity_csv << "variant,purity\n";
    std::cout << "variant,purity\n";
    for (const auto& variant : variants) {
        TrainConfig vc = config;
        vc.subnet_filter = variant.filter;
        auto model = init_model(assignment.schema, vocab, vc.dim, vc.seed, vc.regime);
        auto adam = make_adam_state(model);
        train(model, adam, dataset, vc);
        double purity = cluster_purity(model, assignment, "A");
        purity_csv << variant.name << ',' << purity << '\n';
        std::cout << variant.name << ',' << purity << '\n';
        export_vectors(model, out_dir / variant.name);
    }
    write_resolved_config(app, out_dir);
    return 0;
}

int cmd_ablate(CLI::App& app, const GlobalOpts& global, TrainOpts& opts,
               double heldout_fraction, std::uint64_t eval_seed) {
    opts.config.seed = global.seed;
    auto lc = prepare_corpus(opts);

    // deterministic held-out split
    std::vector<std::size_t> order(lc.dataset.records.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(detail::mix64(global.seed, 0x5eedULL));
    std::shuffle(order.begin(), order.end(), rng);
    auto n_heldout = static_cast<std::size_t>(
        static_cast<double>(order.size()) * heldout_fraction);
    if (n_heldout == 0 || n_heldout >= order.size()) {
        throw ConfigError("heldout fraction leaves no usable train/test split");
    }
    TupleDataset train_set, heldout;
    train_set.vocab_sizes = heldout.vocab_sizes = lc.dataset.vocab_sizes;
    for (std::size_t i = 0; i < order.size(); ++i) {
        auto& dst = i < n_heldout ? heldout : train_set;
        dst.records.push_back(lc.dataset.records[order[i]]);
        dst.counts.push_back(lc.dataset.counts[order[i]]);
    }

    std::vector<std::size_t> roles(lc.schema.arity());
    std::iota(roles.begin(), roles.end(), std::size_t{0});
    auto table = ablate(lc.schema, lc.vocab, train_set, heldout, opts.config, roles,
                        eval_seed);

    fs::path out_dir(global.out);
    fs::create_directories(out_dir);
    std::vector<EvalReport> rows;
    std::cout << "variant,accuracy,items,skipped,coverage\n";
    for (const auto& cell : table) {
        if (cell.ok) {
            rows.push_back(cell.report);
            std::cout << cell.variant << ',' << cell.report.value << ','
                      << cell.report.items << ',' << cell.report.skipped << ','
                      << cell.report.coverage << '\n';
        } else {
            std::cout << cell.variant << ",failed: " << cell.error << '\n';
        }
    }
    write_reports_csv(rows, out_dir / "ablation.csv");
    write_resolved_config(app, out_dir);

    const auto* sync_shared = &table[3];
    const auto* async_sep = &table[0];
    if (sync_shared->ok && async_sep->ok) {
        std::cout << "sync+shared vs async+sep: " << sync_shared->report.value << " vs "
                  << async_sep->report.value
                  << (sync_shared->report.value >= async_sep->report.value ? " (>=)"
                                                                           : " (<)")
                  << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Function-specific word vector spaces: joint multidirectional training "
                 "over word groups plus evaluation tooling"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from an INI config file");
    app.allow_config_extras(false);

    GlobalOpts global;
    app.add_option("--out", global.out, "Output directory")->capture_default_str();
    app.add_option("--seed", global.seed, "Random seed")->capture_default_str();

    // train
    auto* train_cmd = app.add_subcommand("train", "Train a joint model on a tuple corpus");
    TrainOpts train_opts;
    add_train_options(train_cmd, train_opts);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a trained checkpoint");
    eval_cmd->require_subcommand(1);
    std::string ev_checkpoint, ev_corpus, ev_dataset;
    std::string ev_roles;
    std::string ev_composition = "addition";
    std::string ev_role = "both";
    bool ev_no_bias = false;
    bool ev_lax_tokens = false;
    ThematicGroups ev_groups;

    auto* pseudo_cmd =
        eval_cmd->add_subcommand("pseudo", "Pseudo-disambiguation accuracy on held-out tuples");
    pseudo_cmd->add_option("--checkpoint", ev_checkpoint)->required();
    pseudo_cmd->add_option("--corpus", ev_corpus, "Held-out tuple file")->required();
    pseudo_cmd->add_option("--roles", ev_roles, "Groups to corrupt (default: all)");
    pseudo_cmd->add_flag("--lax-tokens", ev_lax_tokens);

    auto* event_cmd =
        eval_cmd->add_subcommand("event-sim", "Event similarity vs human scores");
    event_cmd->add_option("--checkpoint", ev_checkpoint)->required();
    event_cmd->add_option("--dataset", ev_dataset, "`s1 v1 o1 s2 v2 o2 score` file")
        ->required();
    event_cmd
        ->add_option("--composition", ev_composition,
                     "verb-only|addition|copy-object|concat|concat-addition|network")
        ->capture_default_str();
    event_cmd->add_flag("--no-bias", ev_no_bias, "Drop bias terms from the network score");

    auto* thematic_cmd =
        eval_cmd->add_subcommand("thematic", "Thematic fit vs human ratings");
    thematic_cmd->add_option("--checkpoint", ev_checkpoint)->required();
    thematic_cmd->add_option("--dataset", ev_dataset, "`verb noun role score` file")
        ->required();
    thematic_cmd->add_option("--role", ev_role, "agent|patient|both")
        ->check(CLI::IsMember({"agent", "patient", "both"}))
        ->capture_default_str();
    thematic_cmd->add_option("--verb-group", ev_groups.verb)->capture_default_str();
    thematic_cmd->add_option("--agent-group", ev_groups.agent)->capture_default_str();
    thematic_cmd->add_option("--patient-group", ev_groups.patient)->capture_default_str();

    // nn
    auto* nn_cmd = app.add_subcommand("nn", "Nearest neighbours by cosine");
    std::string nn_checkpoint, nn_word, nn_group, nn_target;
    std::size_t nn_k = 10;
    nn_cmd->add_option("--checkpoint", nn_checkpoint)->required();
    nn_cmd->add_option("--word", nn_word)->required();
    nn_cmd->add_option("--group", nn_group, "Query word's group")->required();
    nn_cmd->add_option("--target-group", nn_target, "Group to search (default: query group)");
    nn_cmd->add_option("-k,--k", nn_k)->capture_default_str();

    // export
    auto* export_cmd = app.add_subcommand("export", "Write per-group vector text files");
    std::string ex_checkpoint;
    export_cmd->add_option("--checkpoint", ex_checkpoint)->required();

    // demo-directionality
    auto* demo_cmd = app.add_subcommand(
        "demo-directionality",
        "Synthetic n:1 demo: per-direction vs multidirectional training purity");
    DemoOpts demo_opts;
    demo_cmd->add_option("--items", demo_opts.items)->capture_default_str();
    demo_cmd->add_option("--clusters", demo_opts.clusters)->capture_default_str();
    demo_cmd->add_option("--epochs", demo_opts.epochs)->capture_default_str();
    demo_cmd->add_option("--dim", demo_opts.dim)->capture_default_str();
    demo_cmd->add_option("--batch-size", demo_opts.batch_size)->capture_default_str();
    demo_cmd->add_flag("--balanced", demo_opts.balanced, "Equal-size clusters");

    // ablate
    auto* ablate_cmd = app.add_subcommand(
        "ablate", "Train and compare the {async,sync} x {sep,shared} variants");
    TrainOpts ablate_opts;
    add_train_options(ablate_cmd, ablate_opts);
    double heldout_fraction = 0.1;
    std::uint64_t eval_seed = 97;
    ablate_cmd->add_option("--heldout-fraction", heldout_fraction)->capture_default_str();
    ablate_cmd->add_option("--eval-seed", eval_seed)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (train_cmd->parsed()) return cmd_train(app, global, train_opts);
        if (pseudo_cmd->parsed()) {
            return cmd_eval_pseudo(app, global, ev_checkpoint, ev_corpus, ev_roles,
                                   ev_lax_tokens);
        }
        if (event_cmd->parsed()) {
            return cmd_eval_event_sim(app, global, ev_checkpoint, ev_dataset,
                                      ev_composition, ev_no_bias);
        }
        if (thematic_cmd->parsed()) {
            return cmd_eval_thematic(app, global, ev_checkpoint, ev_dataset, ev_role,
                                     ev_groups);
        }
        if (nn_cmd->parsed()) return cmd_nn(nn_checkpoint, nn_word, nn_group, nn_target, nn_k);
        if (export_cmd->parsed()) return cmd_export(app, global, ex_checkpoint);
        if (demo_cmd->parsed()) return cmd_demo(app, global, demo_opts);
        if (ablate_cmd->parsed()) {
            return cmd_ablate(app, global, ablate_opts, heldout_fraction, eval_seed);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
