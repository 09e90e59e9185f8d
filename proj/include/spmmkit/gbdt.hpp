#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "spmmkit/types.hpp"

namespace spmmkit {

/// Gradient-boosting hyperparameters. Training is exact-greedy and uses no
/// randomness; the seed is carried in model metadata for provenance only.
struct GbdtConfig {
    int num_rounds = 100;
    int max_depth = 4;
    int min_leaf = 5;
    double learning_rate = 0.1;
    int patience = 10;       // early-stop rounds without validation improvement
    double lambda = 1e-6;    // L2 on leaf weights
    std::uint64_t seed = 0;

    friend bool operator==(const GbdtConfig&, const GbdtConfig&) = default;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf score, shrinkage already applied
    double gain = 0.0;   // split gain; feeds feature importance
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double predict(std::span<const double> f) const {
        int i = 0;
        while (nodes[i].feature >= 0)
            i = f[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
        return nodes[i].value;
    }
};

/// One-vs-rest boosted trees on a softmax objective. Prediction is the
/// argmax of raw additive scores (the link is monotone, so it never needs to
/// be applied); ties break toward the lowest class index.
struct TreeEnsembleModel {
    int num_classes = 0;
    int num_features = 0;
    std::vector<std::vector<Tree>> rounds;  // [round][class]
    std::vector<std::string> feature_names;
    GbdtConfig config;
    int best_round = -1;  // last kept round (early stopping), -1 if untrained

    std::vector<double> raw_scores(std::span<const double> f) const {
        std::vector<double> s(num_classes, 0.0);
        for (const auto& round : rounds)
            for (int c = 0; c < num_classes; ++c) s[c] += round[c].predict(f);
        return s;
    }

    int predict_class(std::span<const double> f) const {
        if (static_cast<int>(f.size()) != num_features)
            throw std::invalid_argument("predict: got " + std::to_string(f.size()) +
                                        " features, model expects " +
                                        std::to_string(num_features));
        const auto s = raw_scores(f);
        int best = 0;
        for (int c = 1; c < num_classes; ++c)
            if (s[c] > s[best]) best = c;
        return best;
    }

    /// Per-feature total split gain, normalized to sum 1 when any split
    /// exists; all zeros otherwise.
    std::vector<double> feature_importance() const {
        std::vector<double> imp(num_features, 0.0);
        for (const auto& round : rounds)
            for (const auto& tree : round)
                for (const auto& nd : tree.nodes)
                    if (nd.feature >= 0) imp[nd.feature] += nd.gain;
        const double total = std::accumulate(imp.begin(), imp.end(), 0.0);
        if (total > 0)
            for (auto& v : imp) v /= total;
        return imp;
    }
};

namespace detail {

/// Exact-greedy regression tree on (gradient, hessian) pairs, the classic
/// second-order boosting objective: leaf weight -G/(H+lambda), split gain
/// 0.5*(GL^2/(HL+l) + GR^2/(HR+l) - G^2/(H+l)). Split thresholds sit at
/// midpoints of adjacent distinct feature values, so the learned structure
/// depends on feature ranks only.
class TreeBuilder {
public:
    TreeBuilder(const std::vector<std::vector<double>>& x,
                const std::vector<std::vector<int>>& sorted_idx, const GbdtConfig& cfg)
        : x_(x), sorted_idx_(sorted_idx), cfg_(cfg) {}

    Tree build(const std::vector<double>& g, const std::vector<double>& h) {
        tree_ = Tree{};
        in_node_.assign(x_.size(), 0);
        std::vector<int> all(x_.size());
        std::iota(all.begin(), all.end(), 0);
        grow(all, g, h, 0);
        return std::move(tree_);
    }

private:
    int grow(const std::vector<int>& samples, const std::vector<double>& g,
             const std::vector<double>& h, int depth) {
        double gsum = 0, hsum = 0;
        for (int i : samples) {
            gsum += g[i];
            hsum += h[i];
        }
        const int node = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();

        const int n = static_cast<int>(samples.size());
        double best_gain = 0;
        int best_feature = -1;
        double best_threshold = 0;
        if (depth < cfg_.max_depth && n >= 2 * cfg_.min_leaf) {
            const double parent = score(gsum, hsum);
            for (int i : samples) in_node_[i] = 1;
            const int nf = static_cast<int>(sorted_idx_.size());
            for (int f = 0; f < nf; ++f) {
                double gl = 0, hl = 0;
                int count = 0;
                double prev_value = 0;
                bool have_prev = false;
                for (int i : sorted_idx_[f]) {
                    if (!in_node_[i]) continue;
                    const double v = x_[i][f];
                    if (have_prev && v > prev_value && count >= cfg_.min_leaf &&
                        n - count >= cfg_.min_leaf) {
                        const double gain =
                            score(gl, hl) + score(gsum - gl, hsum - hl) - parent;
                        if (gain > best_gain) {
                            best_gain = gain;
                            best_feature = f;
                            best_threshold = (prev_value + v) / 2;
                        }
                    }
                    gl += g[i];
                    hl += h[i];
                    ++count;
                    prev_value = v;
                    have_prev = true;
                }
            }
            for (int i : samples) in_node_[i] = 0;
        }

        if (best_feature < 0) {
            tree_.nodes[node].value = -gsum / (hsum + cfg_.lambda) * cfg_.learning_rate;
            return node;
        }

        std::vector<int> left, right;
        for (int i : samples)
            (x_[i][best_feature] <= best_threshold ? left : right).push_back(i);
        tree_.nodes[node].feature = best_feature;
        tree_.nodes[node].threshold = best_threshold;
        tree_.nodes[node].gain = best_gain;
        const int l = grow(left, g, h, depth + 1);
        const int r = grow(right, g, h, depth + 1);
        tree_.nodes[node].left = l;
        tree_.nodes[node].right = r;
        return node;
    }

    double score(double g, double h) const { return 0.5 * g * g / (h + cfg_.lambda); }

    const std::vector<std::vector<double>>& x_;
    const std::vector<std::vector<int>>& sorted_idx_;
    const GbdtConfig& cfg_;
    Tree tree_;
    std::vector<char> in_node_;
};

inline void softmax_inplace(std::vector<double>& s) {
    double mx = s[0];
    for (double v : s) mx = std::max(mx, v);
    double sum = 0;
    for (auto& v : s) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (auto& v : s) v /= sum;
}

inline double multiclass_logloss(const std::vector<std::vector<double>>& raw,
                                 const std::vector<int>& y) {
    double loss = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        auto p = raw[i];
        softmax_inplace(p);
        loss -= std::log(std::max(p[y[i]], 1e-15));
    }
    return loss / static_cast<double>(y.size());
}

}  // namespace detail

/// Trains a softmax-objective boosted ensemble: one tree per class per
/// round, gradients p_c - 1{y=c}, hessians p_c(1-p_c). Early stopping
/// watches validation log-loss and keeps the best prefix of rounds. The
/// procedure has no random component, so results are reproducible for any
/// seed; the seed is stored as provenance.
inline TreeEnsembleModel train_gbdt(const std::vector<std::vector<double>>& x,
                                    const std::vector<int>& y, int num_classes,
                                    const std::vector<std::vector<double>>& x_valid,
                                    const std::vector<int>& y_valid,
                                    const GbdtConfig& cfg) {
    if (x.empty()) throw std::invalid_argument("train_gbdt: empty training set");
    if (x.size() != y.size())
        throw std::invalid_argument("train_gbdt: features/labels size mismatch");
    if (cfg.num_rounds < 1) throw std::invalid_argument("train_gbdt: num_rounds must be >= 1");
    if (num_classes < 2) throw std::invalid_argument("train_gbdt: need at least 2 classes");
    const int nf = static_cast<int>(x[0].size());
    for (const auto& row : x)
        if (static_cast<int>(row.size()) != nf)
            throw std::invalid_argument("train_gbdt: ragged feature rows");
    for (int label : y)
        if (label < 0 || label >= num_classes)
            throw std::invalid_argument("train_gbdt: label out of range");

    const int n = static_cast<int>(x.size());
    // One global sort per feature; per-node scans then filter by membership.
    // Ordering by (value, index) keeps everything deterministic through ties.
    std::vector<std::vector<int>> sorted_idx(nf, std::vector<int>(n));
    for (int f = 0; f < nf; ++f) {
        auto& idx = sorted_idx[f];
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](int a, int b) {
            return x[a][f] != x[b][f] ? x[a][f] < x[b][f] : a < b;
        });
    }

    TreeEnsembleModel model;
    model.num_classes = num_classes;
    model.num_features = nf;
    model.config = cfg;

    std::vector<std::vector<double>> scores(n, std::vector<double>(num_classes, 0.0));
    std::vector<std::vector<double>> scores_valid(x_valid.size(),
                                                  std::vector<double>(num_classes, 0.0));
    std::vector<double> g(n), h(n), prob(num_classes);
    detail::TreeBuilder builder(x, sorted_idx, cfg);

    double best_loss = std::numeric_limits<double>::infinity();
    int best = -1;
    const bool have_valid = !x_valid.empty();

    for (int round = 0; round < cfg.num_rounds; ++round) {
        std::vector<std::vector<double>> probs = scores;
        for (auto& row : probs) detail::softmax_inplace(row);

        std::vector<Tree> per_class(num_classes);
        for (int c = 0; c < num_classes; ++c) {
            for (int i = 0; i < n; ++i) {
                const double p = probs[i][c];
                g[i] = p - (y[i] == c ? 1.0 : 0.0);
                h[i] = std::max(p * (1.0 - p), 1e-16);
            }
            per_class[c] = builder.build(g, h);
        }
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < num_classes; ++c) scores[i][c] += per_class[c].predict(x[i]);
        model.rounds.push_back(std::move(per_class));

        if (have_valid) {
            for (std::size_t i = 0; i < x_valid.size(); ++i)
                for (int c = 0; c < num_classes; ++c)
                    scores_valid[i][c] += model.rounds.back()[c].predict(x_valid[i]);
            const double loss = detail::multiclass_logloss(scores_valid, y_valid);
            if (loss < best_loss - 1e-12) {
                best_loss = loss;
                best = round;
            } else if (round - best >= cfg.patience) {
                break;
            }
        }
    }

    if (have_valid && best >= 0)
        model.rounds.resize(static_cast<std::size_t>(best) + 1);
    model.best_round = static_cast<int>(model.rounds.size()) - 1;
    return model;
}

struct ModelFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

template <class T>
T expect_token(std::istream& in, const char* what) {
    T v;
    if (!(in >> v))
        throw ModelFormatError(std::string("model stream truncated or malformed: expected ") +
                               what);
    return v;
}

inline void expect_literal(std::istream& in, const std::string& lit) {
    const auto tok = expect_token<std::string>(in, lit.c_str());
    if (tok != lit)
        throw ModelFormatError("model stream malformed: expected '" + lit + "', got '" + tok +
                               "'");
}

}  // namespace detail

inline constexpr const char* kModelFormatTag = "spmmkit-gbdt";
inline constexpr int kModelFormatVersion = 1;

/// Line-oriented text encoding; doubles carry 17 significant digits so the
/// roundtrip is value-exact.
inline void save_model(std::ostream& out, const TreeEnsembleModel& m) {
    for (const auto& name : m.feature_names)
        if (name.find_first_of(" \t\n") != std::string::npos)
            throw std::invalid_argument("save_model: feature name contains whitespace: '" +
                                        name + "'");
    out << kModelFormatTag << " v" << kModelFormatVersion << "\n";
    out << "classes " << m.num_classes << " features " << m.num_features << " best_round "
        << m.best_round << "\n";
    const auto& c = m.config;
    out << "config num_rounds " << c.num_rounds << " max_depth " << c.max_depth
        << " min_leaf " << c.min_leaf << " learning_rate " << detail::fmt_double(c.learning_rate)
        << " patience " << c.patience << " lambda " << detail::fmt_double(c.lambda) << " seed "
        << c.seed << "\n";
    out << "feature_names " << m.feature_names.size();
    for (const auto& name : m.feature_names) out << ' ' << name;
    out << "\n";
    out << "rounds " << m.rounds.size() << "\n";
    for (std::size_t r = 0; r < m.rounds.size(); ++r) {
        for (int cls = 0; cls < m.num_classes; ++cls) {
            const auto& tree = m.rounds[r][cls];
            out << "tree " << r << ' ' << cls << ' ' << tree.nodes.size() << "\n";
            for (const auto& nd : tree.nodes) {
                if (nd.feature >= 0)
                    out << "node split " << nd.feature << ' '
                        << detail::fmt_double(nd.threshold) << ' ' << nd.left << ' ' << nd.right
                        << ' ' << detail::fmt_double(nd.gain) << "\n";
                else
                    out << "node leaf " << detail::fmt_double(nd.value) << "\n";
            }
        }
    }
    out << "end\n";
    if (!out) throw std::runtime_error("save_model: write failed");
}

inline TreeEnsembleModel load_model(std::istream& in) {
    using detail::expect_literal;
    using detail::expect_token;

    const auto tag = expect_token<std::string>(in, "format tag");
    const auto ver = expect_token<std::string>(in, "format version");
    if (tag != kModelFormatTag)
        throw ModelFormatError("not a model stream (tag '" + tag + "')");
    if (ver != "v" + std::to_string(kModelFormatVersion))
        throw ModelFormatError("unsupported model version '" + ver + "', expected v" +
                               std::to_string(kModelFormatVersion));

    TreeEnsembleModel m;
    expect_literal(in, "classes");
    m.num_classes = expect_token<int>(in, "class count");
    expect_literal(in, "features");
    m.num_features = expect_token<int>(in, "feature count");
    expect_literal(in, "best_round");
    m.best_round = expect_token<int>(in, "best round");
    if (m.num_classes < 1 || m.num_features < 0)
        throw ModelFormatError("implausible class/feature counts");

    expect_literal(in, "config");
    expect_literal(in, "num_rounds");
    m.config.num_rounds = expect_token<int>(in, "num_rounds");
    expect_literal(in, "max_depth");
    m.config.max_depth = expect_token<int>(in, "max_depth");
    expect_literal(in, "min_leaf");
    m.config.min_leaf = expect_token<int>(in, "min_leaf");
    expect_literal(in, "learning_rate");
    m.config.learning_rate = expect_token<double>(in, "learning_rate");
    expect_literal(in, "patience");
    m.config.patience = expect_token<int>(in, "patience");
    expect_literal(in, "lambda");
    m.config.lambda = expect_token<double>(in, "lambda");
    expect_literal(in, "seed");
    m.config.seed = expect_token<std::uint64_t>(in, "seed");

    expect_literal(in, "feature_names");
    const int n_names = expect_token<int>(in, "feature name count");
    if (n_names < 0 || n_names > 4096) throw ModelFormatError("implausible feature name count");
    m.feature_names.resize(n_names);
    for (auto& name : m.feature_names) name = expect_token<std::string>(in, "feature name");

    expect_literal(in, "rounds");
    const int n_rounds = expect_token<int>(in, "round count");
    if (n_rounds < 0 || n_rounds > 1000000) throw ModelFormatError("implausible round count");
    m.rounds.resize(n_rounds);
    for (int r = 0; r < n_rounds; ++r) {
        m.rounds[r].resize(m.num_classes);
        for (int cls = 0; cls < m.num_classes; ++cls) {
            expect_literal(in, "tree");
            const int rr = expect_token<int>(in, "tree round");
            const int cc = expect_token<int>(in, "tree class");
            if (rr != r || cc != cls) throw ModelFormatError("tree out of order");
            const int n_nodes = expect_token<int>(in, "node count");
            if (n_nodes < 1 || n_nodes > 10000000) throw ModelFormatError("implausible node count");
            auto& tree = m.rounds[r][cls];
            tree.nodes.resize(n_nodes);
            for (auto& nd : tree.nodes) {
                expect_literal(in, "node");
                const auto kind = expect_token<std::string>(in, "node kind");
                if (kind == "split") {
                    nd.feature = expect_token<int>(in, "split feature");
                    nd.threshold = expect_token<double>(in, "split threshold");
                    nd.left = expect_token<int>(in, "left child");
                    nd.right = expect_token<int>(in, "right child");
                    nd.gain = expect_token<double>(in, "split gain");
                    if (nd.feature >= m.num_features || nd.left < 0 || nd.right < 0 ||
                        nd.left >= n_nodes || nd.right >= n_nodes)
                        throw ModelFormatError("split node references out of range");
                } else if (kind == "leaf") {
                    nd.feature = -1;
                    nd.value = expect_token<double>(in, "leaf value");
                } else {
                    throw ModelFormatError("unknown node kind '" + kind + "'");
                }
            }
        }
    }
    expect_literal(in, "end");
    return m;
}

}  // namespace spmmkit

