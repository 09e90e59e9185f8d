#pragma once

#include "spmmkit/dataset.hpp"
#include "spmmkit/gbdt.hpp"
#include "spmmkit/metrics.hpp"

namespace spmmkit {

/// Trained kernel chooser: a boosted-tree ensemble over the encoded feature
/// vector. The unified variant appends the hardware tag as one extra
/// integer feature and can serve several machines with a single model.
struct SelectorModel {
    TreeEnsembleModel ensemble;
    bool uses_hardware = false;
};

/// Model-side feature encoding: counts are log2-compressed so split
/// midpoints behave across magnitudes; std_row and n_cols stay raw.
inline std::vector<double> encode_features(const FeatureVector& f, bool uses_hardware) {
    std::vector<double> v{
        std::log2(static_cast<double>(std::max<Index>(f.nnz, 1))),
        std::log2(static_cast<double>(std::max<Index>(f.mat_size, 1))),
        f.std_row,
        static_cast<double>(f.n_cols),
    };
    if (uses_hardware) {
        if (!f.hardware_id)
            throw std::invalid_argument(
                "encode_features: model expects a hardware_id but the sample has none");
        v.push_back(static_cast<double>(*f.hardware_id));
    }
    return v;
}

inline std::vector<std::string> selector_feature_names(bool uses_hardware) {
    std::vector<std::string> names{"log2_nnz", "log2_mat_size", "std_row", "n_cols"};
    if (uses_hardware) names.push_back("hardware_id");
    return names;
}

inline SelectorModel train_selector(const std::vector<TrainingSample>& train,
                                    const std::vector<TrainingSample>& valid,
                                    const GbdtConfig& cfg, bool uses_hardware = false) {
    if (train.empty()) throw std::invalid_argument("train_selector: empty training set");
    std::vector<std::vector<double>> x, xv;
    std::vector<int> y, yv;
    for (const auto& s : train) {
        x.push_back(encode_features(s.features, uses_hardware));
        y.push_back(s.label.index());
    }
    for (const auto& s : valid) {
        xv.push_back(encode_features(s.features, uses_hardware));
        yv.push_back(s.label.index());
    }
    SelectorModel model;
    model.uses_hardware = uses_hardware;
    model.ensemble = train_gbdt(x, y, kNumKernels, xv, yv, cfg);
    model.ensemble.feature_names = selector_feature_names(uses_hardware);
    return model;
}

inline KernelId predict_kernel(const SelectorModel& model, const FeatureVector& f) {
    const auto enc = encode_features(f, model.uses_hardware);
    return KernelId::from_index(model.ensemble.predict_class(enc));
}

struct EvalReport {
    std::vector<double> per_sample_normalized;  // each in (0, 1]
    double average_normalized = 0.0;            // geometric mean
    double accuracy = 0.0;                      // exact argmin-label hit rate
    std::vector<double> feature_importance;     // sums to 1 when any split exists
    std::vector<std::string> feature_names;
};

/// Scores the model on held-out samples: each prediction is rated by how
/// close its measured time is to the per-sample best, aggregated by
/// geometric mean.
inline EvalReport evaluate(const SelectorModel& model,
                           const std::vector<TrainingSample>& test) {
    if (test.empty()) throw std::invalid_argument("evaluate: empty test set");
    EvalReport report;
    std::size_t hits = 0;
    for (const auto& s : test) {
        const KernelId chosen = predict_kernel(model, s.features);
        report.per_sample_normalized.push_back(normalized_performance(s.timings, chosen));
        if (chosen == s.label) ++hits;
    }
    report.average_normalized = average_normalized(report.per_sample_normalized);
    report.accuracy = static_cast<double>(hits) / static_cast<double>(test.size());
    report.feature_importance = model.ensemble.feature_importance();
    report.feature_names = model.ensemble.feature_names;
    return report;
}

/// Static-baseline twin of evaluate(): rates always choosing one kernel.
inline EvalReport evaluate_static(KernelId fixed,
                                  const std::vector<TrainingSample>& test) {
    if (test.empty()) throw std::invalid_argument("evaluate_static: empty test set");
    EvalReport report;
    std::size_t hits = 0;
    for (const auto& s : test) {
        report.per_sample_normalized.push_back(normalized_performance(s.timings, fixed));
        if (fixed == s.label) ++hits;
    }
    report.average_normalized = average_normalized(report.per_sample_normalized);
    report.accuracy = static_cast<double>(hits) / static_cast<double>(test.size());
    return report;
}

inline constexpr const char* kSelectorFormatTag = "spmmkit-selector";
inline constexpr int kSelectorFormatVersion = 1;

inline void save_selector(std::ostream& out, const SelectorModel& model) {
    out << kSelectorFormatTag << " v" << kSelectorFormatVersion << "\n";
    out << "uses_hardware " << (model.uses_hardware ? 1 : 0) << "\n";
    save_model(out, model.ensemble);
}

inline SelectorModel load_selector(std::istream& in) {
    const auto tag = detail::expect_token<std::string>(in, "selector tag");
    const auto ver = detail::expect_token<std::string>(in, "selector version");
    if (tag != kSelectorFormatTag)
        throw ModelFormatError("not a selector stream (tag '" + tag + "')");
    if (ver != "v" + std::to_string(kSelectorFormatVersion))
        throw ModelFormatError("unsupported selector version '" + ver + "', expected v" +
                               std::to_string(kSelectorFormatVersion));
    SelectorModel model;
    detail::expect_literal(in, "uses_hardware");
    model.uses_hardware = detail::expect_token<int>(in, "uses_hardware flag") != 0;
    model.ensemble = load_model(in);
    return model;
}

inline void write_eval_csv(std::ostream& out, const EvalReport& report) {
    out << "metric,value\n";
    out << "average_normalized," << detail::fmt_double(report.average_normalized) << "\n";
    out << "accuracy," << detail::fmt_double(report.accuracy) << "\n";
    out << "samples," << report.per_sample_normalized.size() << "\n";
    for (std::size_t i = 0; i < report.feature_importance.size(); ++i) {
        const std::string name = i < report.feature_names.size()
                                     ? report.feature_names[i]
                                     : "feature_" + std::to_string(i);
        out << "importance_" << name << ',' << detail::fmt_double(report.feature_importance[i])
            << "\n";
    }
    if (!out) throw std::runtime_error("write_eval_csv: write failed");
}

}  // namespace spmmkit
