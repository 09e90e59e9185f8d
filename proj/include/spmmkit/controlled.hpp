#pragma once

#include "spmmkit/bench.hpp"
#include "spmmkit/rmat.hpp"

namespace spmmkit {

/// The three one-factor experiments: each varies a single input property and
/// races the two kernels that differ only in the matching loop choice.
enum class ControlledDimension { RB_EB, RM_CM, SR_PR };

inline const char* dimension_name(ControlledDimension d) {
    switch (d) {
        case ControlledDimension::RB_EB: return "rb-eb";
        case ControlledDimension::RM_CM: return "rm-cm";
        default: return "sr-pr";
    }
}

inline std::optional<ControlledDimension> parse_dimension(std::string_view s) {
    if (s == "rb-eb") return ControlledDimension::RB_EB;
    if (s == "rm-cm") return ControlledDimension::RM_CM;
    if (s == "sr-pr") return ControlledDimension::SR_PR;
    return std::nullopt;
}

struct ControlledPoint {
    RmatParams params;
    Index n_cols = 8;  // varied by RM_CM, fixed elsewhere
};

struct ControlledSpec {
    ControlledDimension dimension = ControlledDimension::RB_EB;
    std::vector<ControlledPoint> series;
    WorkerConfig cfg;
    int reps = 7;
    int warmup = 2;
    bool verify = true;
    std::uint64_t x_seed = 1234;
};

struct TrendRow {
    double varied = 0;  // std_row, N, or nnz depending on the dimension
    double time_a = 0;  // baseline variant: RB / RM / SR
    double time_b = 0;  // contrast variant: EB / CM / PR
    double ratio = 0;   // see run_controlled for the per-dimension convention
};

struct TrendTable {
    ControlledDimension dimension = ControlledDimension::RB_EB;
    std::string varied_name;
    std::string ratio_name;
    std::vector<TrendRow> rows;
    std::string verdict;  // rising / falling / flat / mixed
};

/// Classifies a ratio series: a step counts as movement only when it leaves
/// a +-tau band around the previous value; one direction of movement with
/// none the other way is a trend, both directions is mixed.
inline std::string trend_verdict(std::span<const double> ratios, double tau = 0.10) {
    if (ratios.size() < 2) return "flat";
    bool up = false, down = false;
    for (std::size_t i = 1; i < ratios.size(); ++i) {
        if (ratios[i] > ratios[i - 1] * (1 + tau)) up = true;
        else if (ratios[i] < ratios[i - 1] * (1 - tau)) down = true;
    }
    if (up && down) return "mixed";
    if (up) return "rising";
    if (down) return "falling";
    return "flat";
}

/// True when the series never falls more than `slack` of the previous value
/// in one step: r[i+1] >= (1 - slack) * r[i].
inline bool nondecreasing_with_slack(std::span<const double> ratios, double slack = 0.10) {
    for (std::size_t i = 1; i < ratios.size(); ++i)
        if (ratios[i] < ratios[i - 1] * (1 - slack)) return false;
    return true;
}

namespace detail {

inline void check_series_invariants(const ControlledSpec& spec) {
    if (spec.series.size() < 3)
        throw std::invalid_argument("controlled experiment needs at least 3 series points, got " +
                                    std::to_string(spec.series.size()));
    const auto& first = spec.series.front();
    for (const auto& pt : spec.series) {
        const auto& p = pt.params;
        const auto& f = first.params;
        switch (spec.dimension) {
            case ControlledDimension::RB_EB:
                // skew (a/b/c/d) varies; size and density stay fixed
                if (p.scale != f.scale || p.target_nnz != f.target_nnz ||
                    pt.n_cols != first.n_cols)
                    throw std::invalid_argument(
                        "rb-eb series must vary skew only (scale, nnz, and N fixed)");
                break;
            case ControlledDimension::RM_CM:
                if (p.scale != f.scale || p.target_nnz != f.target_nnz || p.a != f.a ||
                    p.b != f.b || p.c != f.c || p.d != f.d || p.seed != f.seed)
                    throw std::invalid_argument("rm-cm series must vary N only");
                break;
            case ControlledDimension::SR_PR:
                if (p.scale != f.scale || p.a != f.a || p.b != f.b || p.c != f.c ||
                    p.d != f.d || pt.n_cols != first.n_cols)
                    throw std::invalid_argument(
                        "sr-pr series must vary nnz only (scale, skew, and N fixed)");
                break;
        }
    }
}

}  // namespace detail

/// Runs one controlled experiment. Per-dimension setup, with the two unvaried
/// loop choices pinned to RB/RM/SR:
///   RB_EB: varied = measured std_row, ratio = time_RB / time_EB
///   RM_CM: varied = N,                ratio = time_CM / time_RM
///   SR_PR: varied = nnz,              ratio = time_PR / time_SR
/// Each convention puts the contrast kernel's expected gain on a rising
/// ratio, so verdicts read the same way across dimensions.
template <class T = double>
TrendTable run_controlled(const ControlledSpec& spec) {
    detail::check_series_invariants(spec);

    KernelId ka, kb;
    TrendTable table;
    table.dimension = spec.dimension;
    switch (spec.dimension) {
        case ControlledDimension::RB_EB:
            ka = {MChoice::RB, NChoice::RM, KChoice::SR};
            kb = {MChoice::EB, NChoice::RM, KChoice::SR};
            table.varied_name = "std_row";
            table.ratio_name = "rb_over_eb";
            break;
        case ControlledDimension::RM_CM:
            ka = {MChoice::RB, NChoice::RM, KChoice::SR};
            kb = {MChoice::RB, NChoice::CM, KChoice::SR};
            table.varied_name = "n_cols";
            table.ratio_name = "cm_over_rm";
            break;
        case ControlledDimension::SR_PR:
            ka = {MChoice::RB, NChoice::RM, KChoice::SR};
            kb = {MChoice::RB, NChoice::RM, KChoice::PR};
            table.varied_name = "nnz";
            table.ratio_name = "pr_over_sr";
            break;
    }

    for (const auto& pt : spec.series) {
        const auto a = generate_rmat<T>(pt.params);
        const auto x = DenseMatrix<T>::random(a.num_cols, pt.n_cols, Layout::RowMajor,
                                              spec.x_seed ^ pt.params.seed ^ pt.n_cols);
        const auto ra = time_kernel(ka, a, x, spec.cfg, spec.reps, spec.warmup, spec.verify,
                                    dimension_name(spec.dimension));
        const auto rb = time_kernel(kb, a, x, spec.cfg, spec.reps, spec.warmup, spec.verify,
                                    dimension_name(spec.dimension));

        // Trend rows report the minimum over reps: each rep runs the same
        // deterministic computation, interference only ever adds time, so the
        // minimum is the tightest estimate of the cost being compared. (The
        // record store keeps medians, which better reflect operating
        // conditions for training data.)
        TrendRow row;
        switch (spec.dimension) {
            case ControlledDimension::RB_EB:
                row.varied = ra.features.std_row;
                row.ratio = ra.min_time / rb.min_time;
                break;
            case ControlledDimension::RM_CM:
                row.varied = static_cast<double>(pt.n_cols);
                row.ratio = rb.min_time / ra.min_time;
                break;
            case ControlledDimension::SR_PR:
                row.varied = static_cast<double>(a.nnz());
                row.ratio = rb.min_time / ra.min_time;
                break;
        }
        row.time_a = ra.min_time;
        row.time_b = rb.min_time;
        table.rows.push_back(row);
    }

    std::vector<double> ratios;
    for (const auto& r : table.rows) ratios.push_back(r.ratio);
    table.verdict = trend_verdict(ratios);
    return table;
}

inline void write_trend_csv(std::ostream& out, const TrendTable& t) {
    out << t.varied_name << ",time_a_s,time_b_s," << t.ratio_name << ",verdict\n";
    for (const auto& r : t.rows)
        out << detail::fmt_double(r.varied) << ',' << detail::fmt_double(r.time_a) << ','
            << detail::fmt_double(r.time_b) << ',' << detail::fmt_double(r.ratio) << ','
            << t.verdict << "\n";
    if (!out) throw std::runtime_error("write_trend_csv: write failed");
}

}  // namespace spmmkit
