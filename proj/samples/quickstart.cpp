// End-to-end tour: synthesize matrices, benchmark the eight kernels, train
// the selector, and compare it against the best static choice.

#include <iostream>

#include "spmmkit/spmmkit.hpp"

using namespace spmmkit;

int main() {
    // A small corpus of power-law matrices with varied shape and skew.
    std::vector<CorpusEntry<double>> corpus;
    for (int i = 0; i < 12; ++i) {
        RmatParams p;
        p.scale = 6 + i % 3;
        p.target_nnz = 400 << (i % 3);
        p.a = 0.25 + 0.05 * (i % 7);
        p.b = p.c = p.d = (1.0 - p.a) / 3.0;
        p.seed = 1000 + i;
        corpus.push_back({"rmat_" + std::to_string(i), generate_rmat<double>(p)});
    }

    // Time all kernels at several dense widths; one sample per (matrix, N).
    RecordStore store;  // in-memory; pass a path to make runs resumable
    BenchOptions opt;
    opt.reps = 3;
    opt.warmup = 1;
    const WorkerConfig cfg{1, 8, 4};
    const auto result = run_corpus(corpus, {1, 4, 16}, cfg, store, opt);
    std::cout << "measured " << result.new_measurements << " kernel timings, "
              << result.samples.size() << " samples\n";

    // Train on 40%, validate on 10%, report on the remaining 50%.
    const auto split = split_dataset(result.samples, {0.4, 0.1, 0.5}, /*seed=*/7);
    GbdtConfig gcfg;
    gcfg.num_rounds = 60;
    const auto model = train_selector(split.train, split.valid, gcfg);
    const auto report = evaluate(model, split.test);

    double best_static = 0;
    KernelId best_kernel;
    for (const auto k : all_kernels()) {
        const double v = evaluate_static(k, split.test).average_normalized;
        if (v > best_static) {
            best_static = v;
            best_kernel = k;
        }
    }

    std::cout << "selector average normalized performance: " << report.average_normalized
              << "\n";
    std::cout << "best static kernel (" << best_kernel.name()
              << ") average normalized performance: " << best_static << "\n";
    for (std::size_t i = 0; i < report.feature_importance.size(); ++i)
        std::cout << "importance " << report.feature_names[i] << ": "
                  << report.feature_importance[i] << "\n";

    // Pick a kernel for a fresh matrix and run it.
    const auto fresh = generate_rmat<double>({7, 900, 0.6, 0.15, 0.15, 0.1, 99});
    const auto chosen = predict_kernel(model, extract_features(fresh, 16));
    const auto x = DenseMatrix<double>::random(fresh.num_cols, 16, Layout::RowMajor, 5);
    const auto y = spmm_auto_layout(chosen, fresh, x, make_config(chosen, 16));
    std::cout << "chose " << chosen.name() << " for a fresh matrix; y[0,0] = " << y.at(0, 0)
              << "\n";
    return 0;
}
