// Command-line front end: generate matrices, benchmark kernels, train and
// apply the selector, run controlled experiments, and validate kernels
// against the reference.
//
// Exit codes: 0 success, 1 runtime/measurement failure, 2 usage/validation
// error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "spmmkit/spmmkit.hpp"

namespace fs = std::filesystem;
using namespace spmmkit;

namespace {

/// Caller mistakes (bad flags, unreadable inputs, corrupt model files).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GlobalOpts {
    std::uint64_t seed = 42;
    Index workers = 1;
    Index group_width = 8;
    Index col_block = 0;  // 0 = per-kernel recommended width
    bool f32 = false;
    std::string out_dir;
};

std::string resolve_out(const GlobalOpts& g, const std::string& path) {
    if (path.empty() || fs::path(path).is_absolute() || g.out_dir.empty()) return path;
    return (fs::path(g.out_dir) / path).string();
}

WorkerConfig base_config(const GlobalOpts& g) {
    return {g.workers, g.group_width, g.col_block > 0 ? g.col_block : 4};
}

std::vector<Index> parse_index_list(const std::string& csv, const char* what) {
    std::vector<Index> out;
    std::istringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(tok, &used);
            if (used != tok.size() || v < 0) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw UsageError(std::string("bad ") + what + " list entry '" + tok + "'");
        }
    }
    if (out.empty()) throw UsageError(std::string("empty ") + what + " list");
    return out;
}

std::vector<double> parse_double_list(const std::string& csv, const char* what) {
    std::vector<double> out;
    std::istringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw UsageError(std::string("bad ") + what + " list entry '" + tok + "'");
        }
    }
    if (out.empty()) throw UsageError(std::string("empty ") + what + " list");
    return out;
}

template <class T>
CsrMatrix<T> load_matrix(const std::string& path) {
    try {
        return read_matrix_market_file<T>(path);
    } catch (const std::exception& e) {
        throw UsageError("cannot load '" + path + "': " + e.what());
    }
}

/// Expands files and directories (non-recursive, *.mtx) into a sorted list.
std::vector<std::string> expand_matrix_paths(const std::vector<std::string>& inputs) {
    std::vector<std::string> files;
    for (const auto& in : inputs) {
        if (fs::is_directory(in)) {
            for (const auto& entry : fs::directory_iterator(in))
                if (entry.is_regular_file() && entry.path().extension() == ".mtx")
                    files.push_back(entry.path().string());
        } else {
            files.push_back(in);
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

// ---------------------------------------------------------------------------
// gen

int cmd_gen(const GlobalOpts& g, const RmatParams& params, const std::string& out) {
    const auto m = generate_rmat<double>(params);
    const auto path = resolve_out(g, out);
    write_matrix_market_file(path, m);
    const auto f = extract_features(m, 0);
    std::cout << "wrote " << path << ": " << m.num_rows << "x" << m.num_cols
              << ", nnz " << m.nnz() << ", std_row " << f.std_row << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// bench

template <class T>
int cmd_bench(const GlobalOpts& g, const std::vector<std::string>& inputs,
              const std::string& n_csv, int reps, int warmup, bool verify,
              const std::string& store_path, const std::string& dataset_path) {
    const auto n_values = parse_index_list(n_csv, "N");
    const auto files = expand_matrix_paths(inputs);

    std::vector<CorpusEntry<T>> corpus;
    for (const auto& f : files) {
        try {
            corpus.push_back({fs::path(f).stem().string(), load_matrix<T>(f)});
        } catch (const std::exception& e) {
            std::cerr << "skipping " << f << ": " << e.what() << "\n";
        }
    }
    if (corpus.empty()) {
        std::cerr << "no readable matrices\n";
        return 1;
    }

    RecordStore store = store_path.empty() ? RecordStore()
                                           : RecordStore(resolve_out(g, store_path));
    BenchOptions opt;
    opt.reps = reps;
    opt.warmup = warmup;
    opt.verify = verify;
    opt.auto_col_block = g.col_block == 0;
    opt.x_seed = g.seed;
    const auto result = run_corpus<T>(corpus, n_values, base_config(g), store, opt);

    for (const auto& f : result.failures) std::cerr << "failed: " << f << "\n";
    std::cout << result.new_measurements << " new measurements, " << result.samples.size()
              << " samples\n";

    if (!dataset_path.empty()) {
        std::ofstream out(resolve_out(g, dataset_path));
        if (!out) throw std::runtime_error("cannot write " + dataset_path);
        write_samples_csv(out, result.samples);
        std::cout << "dataset: " << resolve_out(g, dataset_path) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// train / eval / predict

std::vector<TrainingSample> load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open dataset '" + path + "'");
    try {
        return read_samples_csv(in);
    } catch (const std::exception& e) {
        throw UsageError("corrupt dataset '" + path + "': " + e.what());
    }
}

SelectorModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open model '" + path + "'");
    try {
        return load_selector(in);
    } catch (const std::exception& e) {
        throw UsageError("corrupt model '" + path + "': " + e.what());
    }
}

int cmd_train(const GlobalOpts& g, const std::string& dataset_path, const std::string& out,
              bool unified, const GbdtConfig& cfg, double r_train, double r_valid,
              double r_test) {
    const auto samples = load_dataset(dataset_path);
    const auto split = split_dataset(samples, {r_train, r_valid, r_test}, g.seed);
    const auto model = train_selector(split.train, split.valid, cfg, unified);

    const auto path = resolve_out(g, out);
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write model to " + path);
    save_selector(os, model);

    const auto report = evaluate(model, split.test);
    std::cout << "trained on " << split.train.size() << " samples ("
              << model.ensemble.rounds.size() << " rounds), validated on "
              << split.valid.size() << "\n";
    std::cout << "test: average_normalized " << report.average_normalized << ", accuracy "
              << report.accuracy << " over " << split.test.size() << " samples\n";
    std::cout << "model: " << path << "\n";
    return 0;
}

int cmd_eval(const GlobalOpts& g, const std::string& model_path,
             const std::string& dataset_path, const std::string& out, bool oracle) {
    const auto samples = load_dataset(dataset_path);

    EvalReport report;
    if (oracle) {
        // Perfect predictor: rates the argmin label itself; a pipeline check.
        for (const auto& s : samples)
            report.per_sample_normalized.push_back(normalized_performance(s.timings, s.label));
        report.average_normalized = average_normalized(report.per_sample_normalized);
        report.accuracy = 1.0;
    } else {
        report = evaluate(load_model_file(model_path), samples);
    }

    std::cout << "average_normalized " << report.average_normalized << ", accuracy "
              << report.accuracy << " over " << samples.size() << " samples\n";
    for (std::size_t i = 0; i < report.feature_importance.size(); ++i)
        std::cout << "importance " << report.feature_names[i] << " "
                  << report.feature_importance[i] << "\n";
    if (!out.empty()) {
        const auto path = resolve_out(g, out);
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot write report to " + path);
        write_eval_csv(os, report);
        std::cout << "report: " << path << "\n";
    }
    return 0;
}

template <class T>
int cmd_predict(const GlobalOpts& g, const std::string& model_path,
                const std::string& matrix_path, Index n, std::optional<int> hardware,
                bool execute, const std::string& execute_out) {
    const auto model = load_model_file(model_path);
    const auto a = load_matrix<T>(matrix_path);
    const auto features = extract_features(a, n, hardware);
    const auto kernel = predict_kernel(model, features);
    std::cout << "kernel " << kernel.name() << "\n";

    if (execute) {
        const auto x = DenseMatrix<T>::random(a.num_cols, n, Layout::RowMajor, g.seed);
        WorkerConfig cfg = base_config(g);
        if (g.col_block == 0) cfg.col_block = recommended_col_block(kernel, n);
        const auto y = spmm_auto_layout(kernel, a, x, cfg);
        double checksum = 0;
        for (const T& v : y.data) checksum += static_cast<double>(v);
        std::cout << "executed: " << y.num_rows << "x" << y.num_cols << ", checksum "
                  << detail::fmt_double(checksum) << "\n";
        if (!execute_out.empty()) {
            const auto path = resolve_out(g, execute_out);
            std::ofstream os(path);
            if (!os) throw std::runtime_error("cannot write result to " + path);
            for (Index r = 0; r < y.num_rows; ++r) {
                for (Index c = 0; c < y.num_cols; ++c)
                    os << (c ? "," : "") << detail::fmt_double(static_cast<double>(y.at(r, c)));
                os << "\n";
            }
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// controlled

int cmd_controlled(const GlobalOpts& g, const std::string& dim_str,
                   const std::string& points_csv, int scale, Index nnz, double skew, Index n,
                   int reps, int warmup, const std::string& out) {
    const auto dim = parse_dimension(dim_str);
    if (!dim) throw UsageError("unknown dimension '" + dim_str + "'");
    const auto points = parse_double_list(points_csv, "points");

    // One skew knob: quadrant (a, b, c, d) = (s, r, r, r) with r = (1-s)/3,
    // so s = 0.25 is uniform and larger s concentrates rows.
    const auto skewed = [&](double s) {
        if (s < 0.25 || s >= 1.0)
            throw UsageError("skew must be in [0.25, 1), got " + std::to_string(s));
        const double r = (1.0 - s) / 3.0;
        return RmatParams{scale, nnz, s, r, r, r, g.seed};
    };

    ControlledSpec spec;
    spec.dimension = *dim;
    spec.cfg = base_config(g);
    spec.reps = reps;
    spec.warmup = warmup;
    spec.x_seed = g.seed;
    switch (*dim) {
        case ControlledDimension::RB_EB:
            for (double s : points) spec.series.push_back({skewed(s), n});
            break;
        case ControlledDimension::RM_CM:
            for (double p : points) {
                if (p < 1 || p != std::floor(p))
                    throw UsageError("rm-cm points must be positive integers (N values)");
                spec.series.push_back({skewed(skew), static_cast<Index>(p)});
            }
            break;
        case ControlledDimension::SR_PR:
            for (double p : points) {
                if (p < 1 || p != std::floor(p))
                    throw UsageError("sr-pr points must be positive integers (nnz values)");
                auto params = skewed(skew);
                params.target_nnz = static_cast<Index>(p);
                spec.series.push_back({params, n});
            }
            break;
    }

    const auto table = run_controlled<double>(spec);
    write_trend_csv(std::cout, table);
    std::cout << "verdict: " << table.verdict << "\n";
    if (!out.empty()) {
        const auto path = resolve_out(g, out);
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot write table to " + path);
        write_trend_csv(os, table);
        std::cout << "table: " << path << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// validate

/// Small built-in shapes that exercise every structural edge the kernels
/// have: dense-ish rows, empty rows, single row/column, and a row group
/// pattern of 6/2/0/3/1 nonzeros that straddles group boundaries at W=4.
template <class T>
std::vector<CorpusEntry<T>> builtin_suite() {
    std::vector<CorpusEntry<T>> suite;
    suite.push_back({"identity8", CsrMatrix<T>::identity(8)});

    std::vector<std::tuple<Index, Index, T>> t;
    for (Index c : {0, 1, 2, 4, 6, 7}) t.push_back({0, c, T(0.5) + T(c)});
    t.push_back({1, 1, T(1.5)});
    t.push_back({1, 5, T(-2.25)});
    t.push_back({3, 0, T(1)});
    t.push_back({3, 3, T(2)});
    t.push_back({3, 7, T(3)});
    t.push_back({4, 2, T(-1)});
    suite.push_back({"ragged_6_2_0_3_1", CsrMatrix<T>::from_coo(5, 8, t)});

    suite.push_back({"single_row",
                     CsrMatrix<T>::from_coo(1, 16, {{0, 0, T(1)}, {0, 7, T(2)}, {0, 15, T(3)}})});
    suite.push_back({"single_col",
                     CsrMatrix<T>::from_coo(16, 1, {{0, 0, T(1)}, {8, 0, T(2)}, {15, 0, T(3)}})});
    suite.push_back({"empty", CsrMatrix<T>::from_coo(6, 6, {})});
    suite.push_back({"rmat_s5", generate_rmat<T>({5, 120, 0.55, 0.15, 0.15, 0.15, 7})});
    suite.push_back({"rmat_s6_skewed", generate_rmat<T>({6, 700, 0.7, 0.1, 0.1, 0.1, 8})});
    return suite;
}

template <class T>
int cmd_validate(const GlobalOpts& g, const std::vector<std::string>& inputs,
                 bool exhaustive_small, bool inject_fault) {
    if (inject_fault) {
        const char* enabled = std::getenv("SPMMKIT_ENABLE_FAULT_INJECTION");
        if (!enabled || std::string(enabled) != "1")
            throw UsageError(
                "--inject-fault requires SPMMKIT_ENABLE_FAULT_INJECTION=1 (self-test only)");
    }

    auto suite = builtin_suite<T>();
    for (const auto& f : expand_matrix_paths(inputs))
        suite.push_back({fs::path(f).stem().string(), load_matrix<T>(f)});

    int checked = 0, failed = 0;
    double worst_rel = 0;
    std::string worst_what;
    bool first_comparison = true;

    for (const auto& entry : suite) {
        for (const Index n : {Index(1), Index(4), Index(9)}) {
            const auto x =
                DenseMatrix<T>::random(entry.matrix.num_cols, n, Layout::RowMajor, g.seed ^ n);
            const auto x_cm = convert_layout(x, Layout::ColMajor);
            const auto ref = spmm_reference(entry.matrix, x);
            for (const auto kernel : all_kernels()) {
                for (const Index w : {Index(2), Index(4), Index(8)}) {
                    WorkerConfig cfg{g.workers, w,
                                     g.col_block > 0 ? g.col_block
                                                     : recommended_col_block(kernel, n)};
                    auto y = spmm(kernel, entry.matrix, kernel.n == NChoice::RM ? x : x_cm, cfg);
                    if (inject_fault && first_comparison && y.data.size() > 0) {
                        y.data[0] += T(1);  // simulated kernel defect
                        first_comparison = false;
                    }
                    ++checked;
                    if (!tolerance_equal(y, ref)) {
                        ++failed;
                        for (Index r = 0; r < y.num_rows; ++r)
                            for (Index c = 0; c < y.num_cols; ++c) {
                                const double a = static_cast<double>(y.at(r, c));
                                const double b = static_cast<double>(ref.at(r, c));
                                const double rel =
                                    std::abs(a - b) / std::max(std::abs(b), 1e-300);
                                if (rel > worst_rel) {
                                    worst_rel = rel;
                                    worst_what = kernel.name() + " on '" + entry.id +
                                                 "' N=" + std::to_string(n) +
                                                 " W=" + std::to_string(w) + " element (" +
                                                 std::to_string(r) + ", " +
                                                 std::to_string(c) + ")";
                                }
                            }
                    }
                }
            }
        }
    }

    if (exhaustive_small) {
        // conditional_reduce against the group-and-sum oracle, every
        // nondecreasing id pattern at W=4.
        std::vector<double> vals{1, 2, 3, 4};
        for (int pattern = 0; pattern < 8; ++pattern) {
            std::vector<Index> ids(4, 0);
            for (int i = 1; i < 4; ++i) ids[i] = ids[i - 1] + ((pattern >> (i - 1)) & 1);
            const auto got = conditional_reduce<double>(vals, ids);
            std::vector<SegmentSum<double>> want;
            for (int i = 0; i < 4; ++i) {
                if (want.empty() || want.back().segment != ids[i])
                    want.push_back({ids[i], vals[i]});
                else
                    want.back().sum += vals[i];
            }
            ++checked;
            if (got.sums != want || !got.carry) {
                ++failed;
                worst_what = "conditional_reduce pattern " + std::to_string(pattern);
            }
        }
        // partition_elements disjoint-cover property over small sizes.
        for (Index nnz = 0; nnz <= 32; ++nnz) {
            CsrMatrix<double> m;
            m.num_rows = std::max<Index>(nnz, 1);
            m.num_cols = 1;
            m.row_offsets.assign(m.num_rows + 1, 0);
            for (Index i = 1; i <= m.num_rows; ++i)
                m.row_offsets[i] = std::min(i, nnz);
            m.col_indices.assign(nnz, 0);
            m.values.assign(nnz, 1.0);
            for (int p = 1; p <= 8; ++p) {
                const auto part = partition_elements(m, p);
                Index cursor = 0;
                bool ok = static_cast<int>(part.chunk_bounds.size()) == p;
                const Index cap = (nnz + p - 1) / p;
                for (const auto& ch : part.chunk_bounds) {
                    ok = ok && ch.begin == cursor && ch.size() >= 0 && ch.size() <= cap;
                    cursor = ch.end;
                }
                ok = ok && cursor == nnz;
                ++checked;
                if (!ok) {
                    ++failed;
                    worst_what = "partition nnz=" + std::to_string(nnz) +
                                 " p=" + std::to_string(p);
                }
            }
        }
    }

    if (failed) {
        std::cout << "FAIL: " << failed << " of " << checked << " checks; worst rel error "
                  << worst_rel << " at " << worst_what << "\n";
        return 1;
    }
    std::cout << "PASS: " << checked << " checks\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SpMM design-space kernels with a learned kernel selector"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may appear before or after the subcommand

    GlobalOpts g;
    if (const char* env = std::getenv("SPMMKIT_OUT_DIR")) g.out_dir = env;
    app.add_option("--seed", g.seed, "global RNG seed");
    app.add_option("-P,--workers", g.workers, "parallel workers")->check(CLI::PositiveNumber);
    app.add_option("-W,--group-width", g.group_width, "reduction group width (power of two)");
    app.add_option("-C,--col-block", g.col_block,
                   "columns per cached segment (0 = per-kernel default)");
    app.add_flag("--f32", g.f32, "use 32-bit scalars");
    app.add_option("--out-dir", g.out_dir, "directory for relative output paths");

    // gen
    auto* gen = app.add_subcommand("gen", "generate an R-MAT matrix (MatrixMarket)");
    RmatParams gp;
    gp.scale = 8;
    gp.target_nnz = 4096;
    gp.a = 0.57;
    gp.b = 0.19;
    gp.c = 0.19;
    gp.d = 0.05;
    std::string gen_out = "rmat.mtx";
    double gen_skew = 0;
    gen->add_option("--scale", gp.scale, "matrix is 2^scale square");
    gen->add_option("--nnz", gp.target_nnz, "target nonzero count");
    auto* gen_a = gen->add_option("--a", gp.a, "top-left quadrant probability");
    auto* gen_b = gen->add_option("--b", gp.b, "top-right quadrant probability");
    auto* gen_c = gen->add_option("--c", gp.c, "bottom-left quadrant probability");
    auto* gen_d = gen->add_option("--d", gp.d, "bottom-right quadrant probability");
    gen->add_option("--skew", gen_skew,
                    "one-knob skew: quadrant probabilities (s, r, r, r) with r = (1-s)/3; "
                    "0.25 is uniform")
        ->check(CLI::Range(0.25, 1.0))
        ->excludes(gen_a)
        ->excludes(gen_b)
        ->excludes(gen_c)
        ->excludes(gen_d);
    gen->add_option("--out", gen_out, "output path");

    // bench
    auto* bench = app.add_subcommand("bench", "benchmark all kernels over a corpus");
    std::vector<std::string> bench_inputs;
    std::string bench_n = "2,8,32,128";
    int bench_reps = 7, bench_warmup = 2;
    bool bench_no_verify = false;
    std::string bench_store, bench_dataset;
    bench->add_option("--matrices", bench_inputs, "matrix files and/or directories")
        ->required();
    bench->add_option("--n", bench_n, "comma-separated N values");
    bench->add_option("--reps", bench_reps, "timed repetitions (>= 3)");
    bench->add_option("--warmup", bench_warmup, "untimed warmup runs");
    bench->add_flag("--no-verify", bench_no_verify, "skip oracle verification");
    bench->add_option("--store", bench_store, "resumable record store CSV");
    bench->add_option("--dataset", bench_dataset, "training dataset CSV to write");

    // train
    auto* train = app.add_subcommand("train", "train the kernel selector");
    std::string train_dataset, train_out = "selector.model";
    bool train_unified = false;
    GbdtConfig tcfg;
    double r_train = 0.4, r_valid = 0.1, r_test = 0.5;
    train->add_option("--dataset", train_dataset, "training dataset CSV")->required();
    train->add_option("--out", train_out, "model output path");
    train->add_flag("--unified", train_unified, "include hardware_id as a feature");
    train->add_option("--rounds", tcfg.num_rounds, "boosting rounds");
    train->add_option("--depth", tcfg.max_depth, "tree depth limit");
    train->add_option("--min-leaf", tcfg.min_leaf, "minimum samples per leaf");
    train->add_option("--learning-rate", tcfg.learning_rate, "shrinkage");
    train->add_option("--patience", tcfg.patience, "early-stop patience (rounds)");
    train->add_option("--ratio-train", r_train, "train fraction");
    train->add_option("--ratio-valid", r_valid, "validation fraction");
    train->add_option("--ratio-test", r_test, "test fraction");

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate a model on a dataset");
    std::string eval_model, eval_dataset, eval_out;
    bool eval_oracle = false;
    eval->add_option("--model", eval_model, "model path");
    eval->add_option("--dataset", eval_dataset, "dataset CSV")->required();
    eval->add_option("--out", eval_out, "report CSV path");
    eval->add_flag("--oracle", eval_oracle, "score the perfect predictor instead of a model");

    // predict
    auto* predict = app.add_subcommand("predict", "choose a kernel for a matrix");
    std::string pred_model, pred_matrix, pred_exec_out;
    Index pred_n = 8;
    int pred_hardware = -1;
    bool pred_execute = false;
    predict->add_option("--model", pred_model, "model path")->required();
    predict->add_option("--matrix", pred_matrix, "MatrixMarket file")->required();
    predict->add_option("--n", pred_n, "dense operand width N");
    predict->add_option("--hardware-id", pred_hardware, "hardware tag (unified models)");
    predict->add_flag("--execute", pred_execute, "run the chosen kernel on a random X");
    predict->add_option("--execute-out", pred_exec_out, "write the dense result as CSV");

    // controlled
    auto* controlled = app.add_subcommand("controlled", "one-factor kernel comparisons");
    std::string ctl_dim = "rb-eb", ctl_points, ctl_out;
    int ctl_scale = 9, ctl_reps = 7, ctl_warmup = 2;
    Index ctl_nnz = 8192, ctl_n = 8;
    double ctl_skew = 0.25;
    controlled->add_option("--dimension", ctl_dim, "rb-eb | rm-cm | sr-pr")->required();
    controlled->add_option("--points", ctl_points,
                           "series points: skew a-values (rb-eb), N values (rm-cm), "
                           "or nnz values (sr-pr)");
    controlled->add_option("--scale", ctl_scale, "R-MAT scale");
    controlled->add_option("--nnz", ctl_nnz, "nonzeros (fixed for rb-eb/rm-cm)");
    controlled->add_option("--skew", ctl_skew, "skew for rm-cm/sr-pr series");
    controlled->add_option("--n", ctl_n, "dense width N (fixed for rb-eb/sr-pr)");
    controlled->add_option("--reps", ctl_reps, "timed repetitions");
    controlled->add_option("--warmup", ctl_warmup, "untimed warmup runs");
    controlled->add_option("--out", ctl_out, "trend table CSV path");

    // validate
    auto* validate_cmd = app.add_subcommand("validate", "check kernels against the reference");
    std::vector<std::string> val_inputs;
    bool val_exhaustive = false, val_inject = false;
    validate_cmd->add_option("--matrices", val_inputs, "extra matrix files/directories");
    validate_cmd->add_flag("--exhaustive-small", val_exhaustive,
                           "also run exhaustive primitive checks");
    validate_cmd
        ->add_flag("--inject-fault", val_inject,
                   "corrupt one result to prove failures are caught (needs "
                   "SPMMKIT_ENABLE_FAULT_INJECTION=1)")
        ->group("");  // hidden

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            gp.seed = g.seed;
            if (gen->count("--skew")) {
                gp.a = gen_skew;
                gp.b = gp.c = gp.d = (1.0 - gen_skew) / 3.0;
            }
            return cmd_gen(g, gp, gen_out);
        }
        if (bench->parsed()) {
            return g.f32 ? cmd_bench<float>(g, bench_inputs, bench_n, bench_reps, bench_warmup,
                                            !bench_no_verify, bench_store, bench_dataset)
                         : cmd_bench<double>(g, bench_inputs, bench_n, bench_reps,
                                             bench_warmup, !bench_no_verify, bench_store,
                                             bench_dataset);
        }
        if (train->parsed()) {
            tcfg.seed = g.seed;
            return cmd_train(g, train_dataset, train_out, train_unified, tcfg, r_train,
                             r_valid, r_test);
        }
        if (eval->parsed()) {
            if (!eval_oracle && eval_model.empty())
                throw UsageError("eval needs --model (or --oracle)");
            return cmd_eval(g, eval_model, eval_dataset, eval_out, eval_oracle);
        }
        if (predict->parsed()) {
            const std::optional<int> hw =
                pred_hardware >= 0 ? std::optional<int>(pred_hardware) : std::nullopt;
            return g.f32 ? cmd_predict<float>(g, pred_model, pred_matrix, pred_n, hw,
                                              pred_execute, pred_exec_out)
                         : cmd_predict<double>(g, pred_model, pred_matrix, pred_n, hw,
                                               pred_execute, pred_exec_out);
        }
        if (controlled->parsed()) {
            if (ctl_points.empty()) {
                if (ctl_dim == "rb-eb") ctl_points = "0.25,0.5,0.7";
                else if (ctl_dim == "rm-cm") ctl_points = "2,8,32";
                else ctl_points = "2000,8000,32000";
            }
            return cmd_controlled(g, ctl_dim, ctl_points, ctl_scale, ctl_nnz, ctl_skew, ctl_n,
                                  ctl_reps, ctl_warmup, ctl_out);
        }
        if (validate_cmd->parsed()) {
            return g.f32 ? cmd_validate<float>(g, val_inputs, val_exhaustive, val_inject)
                         : cmd_validate<double>(g, val_inputs, val_exhaustive, val_inject);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 1;
    }
    return 2;  // no subcommand handled (unreachable with require_subcommand)
}
