// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Thresholds and tolerances are pinned in code.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fswrep/fswrep.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace fswrep;
using Clock = std::chrono::steady_clock;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double x, int precision = 4) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(precision) << x;
    return ss.str();
}

// ---------------------------------------------------------------------------

std::string criterion1_reference_scores() {
    // Published full-scale scores need a 22M-triplet parsed corpus; they are
    // reference points only. The remaining criteria check the desk-scale
    // properties this build can verify end to end.
    return "full-scale reference points (not desk-reproducible): "
           "SVO pseudo-disambiguation 0.943; event similarity network/GS-style 0.53, "
           "addition/KS-style 0.76; thematic fit full/PADO-style 0.58";
}

std::string criterion2_gradient_oracle() {
    auto start = Clock::now();
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<std::size_t> vocab_size(2, 5);
    double worst = 0.0;
    int models = 0;
    for (std::size_t arity : {2u, 3u}) {
        for (std::size_t d : {2u, 3u, 5u}) {
            for (int rep = 0; rep < 4; ++rep) {
                std::vector<std::size_t> sizes;
                for (std::size_t g = 0; g < arity; ++g) sizes.push_back(vocab_size(rng));
                auto schema = testutil::schema_of_arity(arity);
                auto vocab = testutil::sized_vocab(sizes);
                TrainRegime regime{true, rep % 2 == 0};  // exercise shared and sep
                auto model = init_model(schema, vocab, d, rng(), regime);
                auto batch = testutil::random_batch(model, 6, rng);
                worst = std::max(worst, oracle::max_gradcheck_error(model, batch, 1e-4));
                ++models;
            }
        }
    }
    double elapsed = seconds_since(start);
    require(models >= 20, "needs at least 20 models, ran " + std::to_string(models));
    require(worst < 1e-4, "max relative gradient error " + fmt(worst, 8) + " >= 1e-4");
    require(elapsed < 30.0, "gradient oracle took " + fmt(elapsed, 1) + "s >= 30s");
    return std::to_string(models) + " tiny models, max relative error " + fmt(worst, 8) +
           ", " + fmt(elapsed, 1) + "s";
}

std::string criterion3_loss_closed_form() {
    auto schema = GroupSchema::svo();
    auto vocab = testutil::sized_vocab({3, 3, 3});
    auto model = init_model(schema, vocab, 4, 1);
    for (auto& e : model.embeddings) e.fill(0.0);
    std::vector<Record> batch{{0, 1, 2}, {2, 0, 1}};
    auto breakdown = joint_loss(model, batch);
    const double expected = 18.0 * std::log(2.0);  // 6 sub-networks x 3 ln 2
    require(std::fabs(breakdown.total - expected) < 1e-9,
            "joint loss " + fmt(breakdown.total, 12) + " != 18 ln 2");
    double sum = 0.0;
    for (double l : breakdown.per_subnet) sum += l;
    require(std::fabs(sum - breakdown.total) <= 1e-12 * std::fabs(breakdown.total),
            "breakdown does not sum to the total");
    return "zero-init 3-group joint loss = " + fmt(breakdown.total, 12) + " = 18 ln 2, " +
           "6 additive terms";
}

struct SvoSetup {
    SyntheticSvo gen;
    GroupSchema schema;
    Vocabulary vocab;
    TupleDataset train_set;
    TupleDataset heldout;
    CorruptionFilter oracle_filter;
};

SvoSetup make_svo_setup(std::size_t n_train, std::size_t n_heldout, std::uint64_t seed) {
    SvoSetup s{SyntheticSvo(50, 10, 40, 3, seed), GroupSchema::svo(), {}, {}, {}, nullptr};
    auto train_tuples = s.gen.sample(n_train);
    auto heldout_tuples = s.gen.sample(n_heldout);
    s.vocab = build_vocab(train_tuples, s.schema, 1);
    s.train_set = encode(train_tuples, s.vocab);
    s.heldout = encode(heldout_tuples, s.vocab);
    // count only corruptions the latent oracle labels implausible; a swap
    // within the same latent class yields an equally plausible tuple that
    // carries no signal either way
    const Vocabulary& vocab = s.vocab;
    const SyntheticSvo& gen = s.gen;
    s.oracle_filter = [&vocab, &gen](const Record&, const Record& corrupted, std::size_t) {
        return !gen.plausible(vocab.word(0, corrupted[0]), vocab.word(1, corrupted[1]),
                              vocab.word(2, corrupted[2]));
    };
    return s;
}

std::string criterion4_pseudo_disambiguation() {
    auto start = Clock::now();
    auto setup = make_svo_setup(20000, 2000, 13);
    TrainConfig config;  // paper defaults: batch 128, lr 0.001, clip 5.0, d 25
    config.epochs = 25;  // <= 30
    config.seed = 13;
    auto model = init_model(setup.schema, setup.vocab, config.dim, config.seed);
    auto adam = make_adam_state(model);
    train(model, adam, setup.train_set, config);
    std::vector<std::size_t> roles{0, 1, 2};
    auto report = pseudo_disambiguation(model, setup.heldout, roles, 13,
                                        setup.oracle_filter);
    double elapsed = seconds_since(start);
    require(report.value >= 0.95,
            "held-out accuracy " + fmt(report.value) + " < 0.95");
    require(elapsed <= 300.0, "took " + fmt(elapsed, 1) + "s > 5 min");
    return "sync+shared d=25, 25 epochs: held-out accuracy " + fmt(report.value) + " on " +
           std::to_string(report.items) + " oracle-separable items (" +
           std::to_string(report.skipped) + " same-class corruptions skipped), " +
           fmt(elapsed, 1) + "s";
}

std::string criterion5_directionality_demo() {
    auto start = Clock::now();
    auto assignment = gen_synthetic_assignment(2000, 3, 7);
    auto vocab = build_vocab(assignment.pairs, assignment.schema, 1);
    auto dataset = encode(assignment.pairs, vocab);

    TrainConfig config;
    config.dim = 25;
    config.epochs = 24;
    config.seed = 7;
    config.batch_size = 24;

    JointModel probe = init_model(assignment.schema, vocab, 1, 1);
    auto run_variant = [&](std::vector<std::size_t> filter) {
        TrainConfig vc = config;
        vc.subnet_filter = std::move(filter);
        auto model = init_model(assignment.schema, vocab, vc.dim, vc.seed, vc.regime);
        auto adam = make_adam_state(model);
        train(model, adam, dataset, vc);
        return cluster_purity(model, assignment, "A");
    };
    double n_to_1 = run_variant({probe.subnet_index(0, 1)});
    double one_to_n = run_variant({probe.subnet_index(1, 0)});
    double multi = run_variant({});

    double elapsed = seconds_since(start);
    require(multi >= 0.9, "multidirectional purity " + fmt(multi) + " < 0.9");
    require(n_to_1 > one_to_n, "n->1 purity " + fmt(n_to_1) +
                                   " not above 1->n purity " + fmt(one_to_n));
    require(elapsed <= 180.0, "took " + fmt(elapsed, 1) + "s > 3 min");
    return "purity: n->1 " + fmt(n_to_1) + ", 1->n " + fmt(one_to_n) +
           ", multidirectional " + fmt(multi) + ", " + fmt(elapsed, 1) + "s";
}

std::string criterion6_correlation_oracle() {
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<int> tied_values(0, 12);
    double worst_spearman = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(50), y(50);
        for (std::size_t i = 0; i < 50; ++i) {
            x[i] = tied_values(rng);
            y[i] = tied_values(rng);
        }
        double got = spearman(x, y);
        double want = oracle::brute_force_spearman(x, y);
        worst_spearman = std::max(worst_spearman, std::fabs(got - want));
    }
    require(worst_spearman < 1e-12,
            "spearman deviates from the brute-force oracle by " + fmt(worst_spearman, 16));

    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double worst_cos = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a(9), b(9);
        double aa = 0, bb = 0, ab = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = u(rng);
            b[i] = u(rng);
            aa += a[i] * a[i];
            bb += b[i] * b[i];
            ab += a[i] * b[i];
        }
        double direct = ab / (std::sqrt(aa) * std::sqrt(bb));
        worst_cos = std::max(worst_cos, std::fabs(cosine(a, b) - direct));
    }
    require(worst_cos < 1e-12, "cosine deviates from the direct formula");
    return "100 tied 50-element sequences: max |spearman - oracle| = " +
           fmt(worst_spearman, 16) + "; max cosine deviation " + fmt(worst_cos, 16);
}

std::string criterion7_ablation() {
    auto start = Clock::now();
    auto setup = make_svo_setup(20000, 2000, 29);
    TrainConfig base;
    base.epochs = 25;
    base.seed = 29;
    std::vector<std::size_t> roles{0, 1, 2};
    auto table = ablate(setup.schema, setup.vocab, setup.train_set, setup.heldout, base,
                        roles, 29, setup.oracle_filter);
    require(table.size() == 4, "expected 4 grid cells");
    std::cout << "    variant,accuracy,items,skipped\n";
    double sync_shared = -1.0, async_sep = -1.0;
    for (const auto& cell : table) {
        require(cell.ok, cell.variant + " failed: " + cell.error);
        std::cout << "    " << cell.variant << ',' << fmt(cell.report.value) << ','
                  << cell.report.items << ',' << cell.report.skipped << "\n";
        if (cell.variant == "sync+shared") sync_shared = cell.report.value;
        if (cell.variant == "async+sep") async_sep = cell.report.value;
    }
    double elapsed = seconds_since(start);
    require(elapsed <= 1200.0, "took " + fmt(elapsed, 1) + "s > 20 min");
    std::string soft = sync_shared >= async_sep
                           ? "soft check holds: sync+shared >= async+sep"
                           : "SOFT CHECK VIOLATED: sync+shared < async+sep";
    return "all 4 variants trained and scored; " + soft + " (" + fmt(sync_shared) +
           " vs " + fmt(async_sep) + "), " + fmt(elapsed, 1) + "s";
}

std::string criterion8_composition() {
    auto vocab = testutil::sized_vocab({2, 2, 2});
    auto model = init_model(GroupSchema::svo(), vocab, 2, 1);
    for (auto& e : model.embeddings) e.fill(0.0);
    model.embeddings[0].at(0, 0) = 1.0;  // s = (1, 0)
    model.embeddings[1].at(0, 1) = 1.0;  // v = (0, 1)
    model.embeddings[2].at(0, 0) = 1.0;  // o = (1, 1)
    model.embeddings[2].at(0, 1) = 1.0;
    ScoringView view(model);
    const Event e{"g0w0", "g1w0", "g2w0"};

    const std::size_t d = 2;
    require(compose_event(view, e, CompositionKind::VerbOnly).size() == d, "verb-only != d");
    require(compose_event(view, e, CompositionKind::Addition).size() == d, "addition != d");
    require(compose_event(view, e, CompositionKind::CopyObject).size() == d,
            "copy-object != d");
    require(compose_event(view, e, CompositionKind::Concat).size() == 3 * d, "concat != 3d");
    require(compose_event(view, e, CompositionKind::ConcatAddition).size() == 2 * d,
            "concat-addition != 2d");
    require(compose_event(view, e, CompositionKind::Network).size() == 1, "network != scalar");

    auto add = compose_event(view, e, CompositionKind::Addition);
    require(add == std::vector<double>({2.0, 2.0}), "addition worked example");
    auto copy = compose_event(view, e, CompositionKind::CopyObject);
    require(copy == std::vector<double>({1.0, 0.0}), "copy-object worked example");
    auto ca = compose_event(view, e, CompositionKind::ConcatAddition);
    require(ca == std::vector<double>({1.0, 1.0, 1.0, 2.0}),
            "concat-addition worked example");
    return "arities d/d/d/3d/2d/scalar; worked examples exact";
}

std::string slurp_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "missing file: " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string criterion9_determinism() {
    auto dir = testutil::make_temp_dir("acceptance9");
    SyntheticSvo gen(20, 8, 15, 3, 99);
    std::ostringstream corpus;
    for (const auto& t : gen.sample(3000)) {
        corpus << t.words[0] << '\t' << t.words[1] << '\t' << t.words[2] << '\n';
    }
    auto corpus_path = testutil::write_file(dir, "corpus.tsv", corpus.str());

    std::string note;
    const char* cli = std::getenv("FSWREP_CLI");
    if (cli && *cli) {
        auto run = [&](const std::string& out) {
            std::string cmd = std::string(cli) + " --out " + out +
                              " --seed 5 train --corpus " + corpus_path.string() +
                              " --min-count 1 --dim 8 --epochs 3 > " + out + ".log 2>&1";
            int status = std::system(cmd.c_str());
            require(WIFEXITED(status) && WEXITSTATUS(status) == 0, "cli train run failed");
        };
        run((dir / "runA").string());
        run((dir / "runB").string());
        auto a = slurp_bytes(dir / "runA" / "checkpoint.fsw");
        auto b = slurp_bytes(dir / "runB" / "checkpoint.fsw");
        require(a == b, "two cli train runs disagree on checkpoint bytes");

        auto loaded = load_model(dir / "runA" / "checkpoint.fsw");
        save_model(loaded.model, loaded.adam, loaded.config, dir / "roundtrip.fsw");
        require(a == slurp_bytes(dir / "roundtrip.fsw"),
                "checkpoint round-trip is not byte-exact");
        note = "two cli runs byte-identical (" + std::to_string(a.size()) +
               " bytes); load/save round-trip byte-exact";
    } else {
        // library-level fallback when the binary path is not provided
        auto loaded = load_tuples(corpus_path.string(), GroupSchema::svo());
        auto vocab = build_vocab(loaded.tuples, GroupSchema::svo(), 1);
        auto ds = encode(loaded.tuples, vocab);
        TrainConfig config;
        config.dim = 8;
        config.epochs = 3;
        config.seed = 5;
        auto run = [&](const std::filesystem::path& path) {
            auto model = init_model(GroupSchema::svo(), vocab, config.dim, config.seed);
            auto adam = make_adam_state(model);
            train(model, adam, ds, config);
            save_model(model, adam, config, path);
        };
        run(dir / "a.fsw");
        run(dir / "b.fsw");
        require(slurp_bytes(dir / "a.fsw") == slurp_bytes(dir / "b.fsw"),
                "two library train runs disagree on checkpoint bytes");
        note = "two library-level runs byte-identical (cli path not provided)";
    }
    return note;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        std::string name;
        std::function<std::string()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "full-scale scores are reference points only", criterion1_reference_scores},
        {2, "analytic gradients match finite differences", criterion2_gradient_oracle},
        {3, "zero-model joint loss equals 6 x 3 ln 2", criterion3_loss_closed_form},
        {4, "synthetic pseudo-disambiguation accuracy >= 0.95",
         criterion4_pseudo_disambiguation},
        {5, "directionality demo purities", criterion5_directionality_demo},
        {6, "spearman/cosine match independent oracles", criterion6_correlation_oracle},
        {7, "ablation grid over regimes and sharing", criterion7_ablation},
        {8, "composition functions conform", criterion8_composition},
        {9, "training and checkpoints are deterministic", criterion9_determinism},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        try {
            std::string detail = criterion.run();
            std::cout << "[PASS] criterion " << criterion.id << ": " << criterion.name
                      << " — " << detail << "\n";
        } catch (const std::exception& e) {
            ++failures;
            std::cout << "[FAIL] criterion " << criterion.id << ": " << criterion.name
                      << " — " << e.what() << "\n";
        }
    }
    if (failures) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all " << criteria.size() << " criteria passed\n";
    return 0;
}
