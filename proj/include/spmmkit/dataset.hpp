#pragma once

#include <array>
#include <istream>
#include <ostream>
#include <sstream>

#include "spmmkit/features.hpp"
#include "spmmkit/gbdt.hpp"
#include "spmmkit/kernel_id.hpp"
#include "spmmkit/metrics.hpp"

namespace spmmkit {

/// One labeled observation: a matrix/N pair's features, the measured time of
/// each kernel in canonical order, and the argmin label.
struct TrainingSample {
    FeatureVector features;
    std::array<double, kNumKernels> timings{};
    KernelId label;
    std::string matrix_id;  // provenance, not a model input
};

/// Builds a sample, labeling it with the fastest kernel (ties break toward
/// the lowest canonical index).
inline TrainingSample make_sample(FeatureVector features,
                                  std::array<double, kNumKernels> timings,
                                  std::string matrix_id = {}) {
    int best = 0;
    for (int i = 0; i < kNumKernels; ++i) {
        if (!(timings[i] > 0) || !std::isfinite(timings[i]))
            throw std::invalid_argument("make_sample: timings must be finite and > 0");
        if (timings[i] < timings[best]) best = i;
    }
    return {features, timings, KernelId::from_index(best), std::move(matrix_id)};
}

struct SplitRatios {
    double train = 0.4;
    double valid = 0.1;
    double test = 0.5;
};

struct DatasetSplit {
    std::vector<TrainingSample> train;
    std::vector<TrainingSample> valid;
    std::vector<TrainingSample> test;
};

/// Seeded shuffle then contiguous cut. Set sizes are floor(n*ratio) for
/// train and valid; the remainder goes to test. The shuffle is a hand-rolled
/// Fisher-Yates so the split is reproducible across standard libraries.
inline DatasetSplit split_dataset(const std::vector<TrainingSample>& samples,
                                  SplitRatios ratios, std::uint64_t seed) {
    for (double r : {ratios.train, ratios.valid, ratios.test})
        if (!(r > 0)) throw std::invalid_argument("split_dataset: ratios must be positive");
    const double sum = ratios.train + ratios.valid + ratios.test;
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("split_dataset: ratios sum to " + std::to_string(sum) +
                                    ", expected 1");
    if (samples.size() < 3)
        throw std::invalid_argument("split_dataset: need at least 3 samples, got " +
                                    std::to_string(samples.size()));

    std::vector<std::size_t> order(samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    for (std::size_t i = order.size() - 1; i > 0; --i)
        std::swap(order[i], order[rng() % (i + 1)]);

    const auto n = samples.size();
    const auto n_train = static_cast<std::size_t>(static_cast<double>(n) * ratios.train);
    const auto n_valid = static_cast<std::size_t>(static_cast<double>(n) * ratios.valid);

    DatasetSplit split;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = samples[order[i]];
        if (i < n_train)
            split.train.push_back(s);
        else if (i < n_train + n_valid)
            split.valid.push_back(s);
        else
            split.test.push_back(s);
    }
    return split;
}

/// Dataset CSV: one sample per row, timings in canonical kernel order.
inline constexpr const char* kDatasetCsvHeader =
    "matrix_id,nnz,mat_size,std_row,n_cols,hardware_id,"
    "t0,t1,t2,t3,t4,t5,t6,t7,label";

inline void write_samples_csv(std::ostream& out,
                              const std::vector<TrainingSample>& samples) {
    out << kDatasetCsvHeader << "\n";
    for (const auto& s : samples) {
        out << s.matrix_id << ',' << s.features.nnz << ',' << s.features.mat_size << ','
            << detail::fmt_double(s.features.std_row) << ',' << s.features.n_cols << ',';
        if (s.features.hardware_id) out << *s.features.hardware_id;
        for (double t : s.timings) out << ',' << detail::fmt_double(t);
        out << ',' << s.label.name() << "\n";
    }
    if (!out) throw std::runtime_error("write_samples_csv: write failed");
}

inline std::vector<TrainingSample> read_samples_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("read_samples_csv: empty stream");
    if (line != kDatasetCsvHeader)
        throw std::runtime_error("read_samples_csv: unexpected header '" + line + "'");

    std::vector<TrainingSample> samples;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (line.back() == ',') cells.push_back("");
        if (cells.size() != 15)
            throw std::runtime_error("read_samples_csv: line " + std::to_string(lineno) +
                                     " has " + std::to_string(cells.size()) +
                                     " fields, expected 15");
        try {
            TrainingSample s;
            s.matrix_id = cells[0];
            s.features.nnz = std::stoll(cells[1]);
            s.features.mat_size = std::stoll(cells[2]);
            s.features.std_row = std::stod(cells[3]);
            s.features.n_cols = std::stoll(cells[4]);
            if (!cells[5].empty()) s.features.hardware_id = std::stoi(cells[5]);
            std::array<double, kNumKernels> t{};
            for (int i = 0; i < kNumKernels; ++i) t[i] = std::stod(cells[6 + i]);
            const auto label = KernelId::parse(cells[14]);
            if (!label)
                throw std::runtime_error("bad kernel label '" + cells[14] + "'");
            s = make_sample(s.features, t, s.matrix_id);
            if (s.label != *label)
                throw std::runtime_error("label '" + cells[14] +
                                         "' is not the argmin of the timings");
            samples.push_back(std::move(s));
        } catch (const std::runtime_error&) {
            throw;
        } catch (const std::exception& e) {
            throw std::runtime_error("read_samples_csv: line " + std::to_string(lineno) +
                                     ": " + e.what());
        }
    }
    return samples;
}

}  // namespace spmmkit
