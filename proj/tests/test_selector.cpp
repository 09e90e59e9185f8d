#include <gtest/gtest.h>

#include <sstream>

#include "test_util.hpp"

using namespace spmmkit;

namespace {

GbdtConfig quick_config() {
    GbdtConfig cfg;
    cfg.num_rounds = 30;
    cfg.max_depth = 3;
    cfg.min_leaf = 2;
    return cfg;
}

/// Sample whose argmin kernel is `best`, with controllable features.
TrainingSample labeled(int best, double std_row, Index nnz = 1000, Index n_cols = 8,
                       std::optional<int> hw = std::nullopt) {
    FeatureVector fv;
    fv.nnz = nnz;
    fv.mat_size = 512;
    fv.std_row = std_row;
    fv.n_cols = n_cols;
    fv.hardware_id = hw;
    return make_sample(fv, tutil::timings_with_best(best, 1e-4),
                       "m_" + std::to_string(best) + "_" + std::to_string(std_row));
}

/// Training set where low row-skew favors kernel 0 and high skew kernel 4 —
/// the kind of boundary the selector exists to learn.
std::vector<TrainingSample> skew_rule_samples(int per_class, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> low(0.0, 4.0), high(16.0, 30.0);
    std::vector<TrainingSample> out;
    for (int i = 0; i < per_class; ++i) {
        out.push_back(labeled(0, low(rng)));
        out.push_back(labeled(4, high(rng)));
    }
    return out;
}

}  // namespace

TEST(EncodeFeatures, LogCompressionAndOrder) {
    FeatureVector f;
    f.nnz = 1024;
    f.mat_size = 256;
    f.std_row = 3.25;
    f.n_cols = 33;
    const auto enc = encode_features(f, false);
    ASSERT_EQ(enc.size(), 4u);
    EXPECT_DOUBLE_EQ(enc[0], 10.0);
    EXPECT_DOUBLE_EQ(enc[1], 8.0);
    EXPECT_DOUBLE_EQ(enc[2], 3.25);
    EXPECT_DOUBLE_EQ(enc[3], 33.0);
}

TEST(EncodeFeatures, ZeroCountsClampToLogOfOne) {
    FeatureVector f;  // nnz = mat_size = 0
    const auto enc = encode_features(f, false);
    EXPECT_EQ(enc[0], 0.0);
    EXPECT_EQ(enc[1], 0.0);
}

TEST(EncodeFeatures, HardwareTagAppended) {
    FeatureVector f;
    f.hardware_id = 2;
    const auto enc = encode_features(f, true);
    ASSERT_EQ(enc.size(), 5u);
    EXPECT_DOUBLE_EQ(enc[4], 2.0);
}

TEST(EncodeFeatures, MissingHardwareTagThrows) {
    FeatureVector f;  // no hardware_id
    EXPECT_THROW(encode_features(f, true), std::invalid_argument);
    EXPECT_NO_THROW(encode_features(f, false));
}

TEST(EncodeFeatures, NamesMatchLayout) {
    const auto plain = selector_feature_names(false);
    EXPECT_EQ(plain, (std::vector<std::string>{"log2_nnz", "log2_mat_size", "std_row",
                                               "n_cols"}));
    const auto unified = selector_feature_names(true);
    ASSERT_EQ(unified.size(), 5u);
    EXPECT_EQ(unified[4], "hardware_id");
}

TEST(Selector, LearnsSkewRule) {
    const auto train = skew_rule_samples(12, 1);
    const auto valid = skew_rule_samples(3, 2);
    const auto model = train_selector(train, valid, quick_config());
    EXPECT_FALSE(model.uses_hardware);
    EXPECT_EQ(model.ensemble.feature_names, selector_feature_names(false));

    EXPECT_EQ(predict_kernel(model, labeled(0, 1.0).features).index(), 0);
    EXPECT_EQ(predict_kernel(model, labeled(0, 3.9).features).index(), 0);
    EXPECT_EQ(predict_kernel(model, labeled(0, 20.0).features).index(), 4);
    EXPECT_EQ(predict_kernel(model, labeled(0, 28.0).features).index(), 4);
}

TEST(Selector, EvaluateOnLearnableRuleIsPerfect) {
    const auto train = skew_rule_samples(12, 3);
    const auto valid = skew_rule_samples(3, 4);
    const auto test = skew_rule_samples(8, 5);
    const auto model = train_selector(train, valid, quick_config());
    const auto report = evaluate(model, test);
    EXPECT_DOUBLE_EQ(report.average_normalized, 1.0);
    EXPECT_DOUBLE_EQ(report.accuracy, 1.0);
    ASSERT_EQ(report.per_sample_normalized.size(), test.size());
    for (double v : report.per_sample_normalized) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(Selector, EvaluateReportsImportance) {
    const auto train = skew_rule_samples(12, 6);
    const auto model = train_selector(train, {}, quick_config());
    const auto report = evaluate(model, skew_rule_samples(4, 7));
    ASSERT_EQ(report.feature_importance.size(), 4u);
    double total = 0;
    for (double v : report.feature_importance) total += v;
    EXPECT_NEAR(total, 1.0, 1e-12);
    // std_row carries the rule; it must dominate.
    EXPECT_GT(report.feature_importance[2], 0.5);
    EXPECT_EQ(report.feature_names, selector_feature_names(false));
}

TEST(Selector, EvaluateStaticMatchesHandComputation) {
    // Two samples, fixed kernel 2: scores min/t2 = 1.0/4.0 and 2.0/8.0... use
    // explicit arrays so the oracle is straightforward.
    std::array<double, 8> ta{};
    for (int i = 0; i < 8; ++i) ta[i] = 1.0 + i;  // best 1.0 at kernel 0, t2 = 3.0
    std::array<double, 8> tb{};
    for (int i = 0; i < 8; ++i) tb[i] = 2.0 * (8 - i);  // best 2.0 at kernel 7, t2 = 12.0
    const std::vector<TrainingSample> test{make_sample(FeatureVector{}, ta),
                                           make_sample(FeatureVector{}, tb)};
    const auto report = evaluate_static(KernelId::from_index(2), test);
    const double s0 = 1.0 / 3.0, s1 = 2.0 / 12.0;
    EXPECT_DOUBLE_EQ(report.per_sample_normalized[0], s0);
    EXPECT_DOUBLE_EQ(report.per_sample_normalized[1], s1);
    EXPECT_NEAR(report.average_normalized, std::sqrt(s0 * s1), 1e-12);
    EXPECT_DOUBLE_EQ(report.accuracy, 0.0);

    const auto hit = evaluate_static(KernelId::from_index(0), test);
    EXPECT_DOUBLE_EQ(hit.accuracy, 0.5);
}

TEST(Selector, UnifiedModelSeparatesHardwareTags) {
    // Identical matrix features; only the hardware tag flips the winner.
    std::vector<TrainingSample> train, valid;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> jitter(2.0, 3.0);
    for (int i = 0; i < 14; ++i) {
        train.push_back(labeled(1, jitter(rng), 1000, 8, 0));
        train.push_back(labeled(6, jitter(rng), 1000, 8, 1));
    }
    for (int i = 0; i < 4; ++i) {
        valid.push_back(labeled(1, jitter(rng), 1000, 8, 0));
        valid.push_back(labeled(6, jitter(rng), 1000, 8, 1));
    }
    const auto model = train_selector(train, valid, quick_config(), true);
    EXPECT_TRUE(model.uses_hardware);

    auto probe = labeled(0, 2.5, 1000, 8, 0).features;
    EXPECT_EQ(predict_kernel(model, probe).index(), 1);
    probe.hardware_id = 1;
    EXPECT_EQ(predict_kernel(model, probe).index(), 6);

    probe.hardware_id.reset();
    EXPECT_THROW(predict_kernel(model, probe), std::invalid_argument);
}

TEST(Selector, TrainRejectsMissingTagWhenUnified) {
    auto train = skew_rule_samples(6, 9);  // samples carry no hardware_id
    EXPECT_THROW(train_selector(train, {}, quick_config(), true), std::invalid_argument);
}

TEST(Selector, EmptyInputsThrow) {
    EXPECT_THROW(train_selector({}, {}, quick_config()), std::invalid_argument);
    const auto train = skew_rule_samples(6, 10);
    const auto model = train_selector(train, {}, quick_config());
    EXPECT_THROW(evaluate(model, {}), std::invalid_argument);
    EXPECT_THROW(evaluate_static(KernelId::from_index(0), {}), std::invalid_argument);
}

TEST(SelectorSerialization, RoundtripKeepsPredictionsAndFlag) {
    for (bool unified : {false, true}) {
        std::vector<TrainingSample> train;
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> low(0.0, 4.0), high(16.0, 30.0);
        for (int i = 0; i < 10; ++i) {
            train.push_back(labeled(0, low(rng), 1000, 8,
                                    unified ? std::optional<int>(0) : std::nullopt));
            train.push_back(labeled(4, high(rng), 1000, 8,
                                    unified ? std::optional<int>(1) : std::nullopt));
        }
        const auto model = train_selector(train, {}, quick_config(), unified);
        std::ostringstream os;
        save_selector(os, model);
        std::istringstream is(os.str());
        const auto back = load_selector(is);
        EXPECT_EQ(back.uses_hardware, model.uses_hardware);
        EXPECT_EQ(back.ensemble.feature_names, model.ensemble.feature_names);
        for (const auto& s : train)
            EXPECT_EQ(predict_kernel(back, s.features), predict_kernel(model, s.features));
    }
}

TEST(SelectorSerialization, RejectsForeignStreams) {
    // A bare ensemble stream is not a selector stream.
    const auto train = skew_rule_samples(6, 12);
    const auto model = train_selector(train, {}, quick_config());
    std::ostringstream os;
    save_model(os, model.ensemble);
    std::istringstream is(os.str());
    EXPECT_THROW(load_selector(is), ModelFormatError);

    std::istringstream truncated("spmmkit-selector v1\nuses_hardware 0\n");
    EXPECT_THROW(load_selector(truncated), ModelFormatError);

    std::istringstream vbump("spmmkit-selector v9\nuses_hardware 0\n");
    EXPECT_THROW(load_selector(vbump), ModelFormatError);
}

TEST(SelectorSerialization, EvalCsvShape) {
    const auto train = skew_rule_samples(8, 13);
    const auto model = train_selector(train, {}, quick_config());
    const auto report = evaluate(model, skew_rule_samples(3, 14));
    std::ostringstream os;
    write_eval_csv(os, report);
    const auto text = os.str();
    EXPECT_EQ(text.rfind("metric,value\n", 0), 0u);
    EXPECT_NE(text.find("average_normalized,"), std::string::npos);
    EXPECT_NE(text.find("accuracy,"), std::string::npos);
    EXPECT_NE(text.find("samples,6"), std::string::npos);
    EXPECT_NE(text.find("importance_std_row,"), std::string::npos);
}
