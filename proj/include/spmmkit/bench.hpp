#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>

#include "spmmkit/dataset.hpp"
#include "spmmkit/spmm.hpp"

namespace spmmkit {

/// One timed (matrix, N, kernel) measurement.
struct BenchRecord {
    std::string matrix_id;
    FeatureVector features;
    KernelId kernel;
    Index n_cols = 0;
    int reps = 0;
    int warmup = 0;
    double median_time = 0;  // seconds
    double min_time = 0;     // seconds
    double checksum = 0;     // sum of output entries, for drift detection
};

struct BenchOptions {
    int reps = 7;
    int warmup = 2;
    bool verify = true;          // check the last run against spmm_reference
    bool auto_col_block = true;  // per-kernel recommended C instead of cfg.col_block
    std::uint64_t x_seed = 99;   // seed base for the dense operands
};

struct BenchVerificationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

/// Stable 64-bit string hash (FNV-1a); keys the per-(matrix, N) dense
/// operand so resumed runs regenerate identical inputs.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace detail

/// Times an arbitrary kernel invocation: `warmup` untimed runs, then `reps`
/// timed ones on the monotonic clock. Median and min land in the record;
/// the checksum and the optional oracle check use the last run's output.
template <class T>
BenchRecord time_kernel_fn(const std::function<DenseMatrix<T>()>& run,
                           const DenseMatrix<T>* reference, std::string matrix_id,
                           const FeatureVector& features, KernelId kernel, int reps,
                           int warmup) {
    if (reps < 3)
        throw std::invalid_argument("time_kernel_fn: need reps >= 3, got " +
                                    std::to_string(reps));
    if (warmup < 0) throw std::invalid_argument("time_kernel_fn: negative warmup");

    for (int i = 0; i < warmup; ++i) run();

    std::vector<double> times;
    times.reserve(reps);
    DenseMatrix<T> last;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        last = run();
        const auto t1 = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(t1 - t0).count();
        if (s < 0) throw std::runtime_error("time_kernel_fn: clock went backwards");
        times.push_back(std::max(s, 1e-9));  // keep durations strictly positive
    }

    if (reference) {
        if (!tolerance_equal(last, *reference)) {
            double worst = 0;
            Index wr = 0, wc = 0;
            for (Index r = 0; r < last.num_rows; ++r)
                for (Index c = 0; c < last.num_cols; ++c) {
                    const double d = std::abs(static_cast<double>(last.at(r, c)) -
                                              static_cast<double>(reference->at(r, c)));
                    if (d > worst) {
                        worst = d;
                        wr = r;
                        wc = c;
                    }
                }
            throw BenchVerificationError(
                "kernel " + kernel.name() + " on '" + matrix_id +
                "' disagrees with the reference; worst |diff| = " + std::to_string(worst) +
                " at (" + std::to_string(wr) + ", " + std::to_string(wc) + ")");
        }
    }

    BenchRecord rec;
    rec.matrix_id = std::move(matrix_id);
    rec.features = features;
    rec.kernel = kernel;
    rec.n_cols = features.n_cols;
    rec.reps = reps;
    rec.warmup = warmup;
    rec.median_time = detail::median_of(times);
    rec.min_time = *std::min_element(times.begin(), times.end());
    double checksum = 0;
    for (const T& v : last.data) checksum += static_cast<double>(v);
    rec.checksum = checksum;
    return rec;
}

/// Times spmm() proper. X is laid out for the kernel before timing starts,
/// so layout conversion never counts against the kernel.
template <class T>
BenchRecord time_kernel(KernelId kernel, const CsrMatrix<T>& a, const DenseMatrix<T>& x,
                        const WorkerConfig& cfg, int reps, int warmup, bool verify = true,
                        std::string matrix_id = {}) {
    const Layout want = kernel.n == NChoice::RM ? Layout::RowMajor : Layout::ColMajor;
    const DenseMatrix<T> xk = convert_layout(x, want);
    DenseMatrix<T> ref;
    if (verify) ref = spmm_reference(a, x);
    const auto features = extract_features(a, x.num_cols);
    return time_kernel_fn<T>([&] { return spmm(kernel, a, xk, cfg); },
                             verify ? &ref : nullptr, std::move(matrix_id), features, kernel,
                             reps, warmup);
}

inline constexpr const char* kRecordCsvHeader =
    "matrix_id,N,kernel,reps,warmup,median_s,min_s,checksum,nnz,mat_size,std_row";

/// Append-only CSV store of benchmark records. Reopening an existing file
/// reloads its rows, which is what makes corpus runs resumable.
class RecordStore {
public:
    RecordStore() = default;  // in-memory only

    explicit RecordStore(std::string path) : path_(std::move(path)) {
        if (!std::filesystem::exists(path_)) return;
        std::ifstream in(path_);
        if (!in) throw std::runtime_error("RecordStore: cannot read " + path_);
        std::string line;
        if (!std::getline(in, line)) return;  // empty file: treat as fresh
        if (line != kRecordCsvHeader)
            throw std::runtime_error("RecordStore: unexpected header in " + path_);
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            add_to_memory(parse_row(line, lineno));
        }
    }

    bool contains(const std::string& matrix_id, Index n, KernelId kernel) const {
        return keys_.count(key(matrix_id, n, kernel)) > 0;
    }

    const BenchRecord* find(const std::string& matrix_id, Index n, KernelId kernel) const {
        const auto it = keys_.find(key(matrix_id, n, kernel));
        return it == keys_.end() ? nullptr : &records_[it->second];
    }

    /// Appends one record to memory and, when file-backed, to disk.
    /// Duplicate (matrix, N, kernel) keys are rejected.
    void append(const BenchRecord& rec) {
        if (contains(rec.matrix_id, rec.n_cols, rec.kernel))
            throw std::invalid_argument("RecordStore: duplicate record for " +
                                        key(rec.matrix_id, rec.n_cols, rec.kernel));
        if (!path_.empty()) {
            const bool fresh = !std::filesystem::exists(path_) ||
                               std::filesystem::file_size(path_) == 0;
            std::ofstream out(path_, std::ios::app);
            if (!out) throw std::runtime_error("RecordStore: cannot write " + path_);
            if (fresh) out << kRecordCsvHeader << "\n";
            write_row(out, rec);
            if (!out) throw std::runtime_error("RecordStore: write failed on " + path_);
        }
        add_to_memory(rec);
    }

    const std::vector<BenchRecord>& records() const { return records_; }
    const std::string& path() const { return path_; }

private:
    static std::string key(const std::string& matrix_id, Index n, KernelId kernel) {
        return matrix_id + "|" + std::to_string(n) + "|" + kernel.name();
    }

    void add_to_memory(BenchRecord rec) {
        keys_.emplace(key(rec.matrix_id, rec.n_cols, rec.kernel), records_.size());
        records_.push_back(std::move(rec));
    }

    static void write_row(std::ostream& out, const BenchRecord& r) {
        std::string id = r.matrix_id;
        for (auto& ch : id)
            if (ch == ',' || ch == '|') ch = '_';
        out << id << ',' << r.n_cols << ',' << r.kernel.name() << ',' << r.reps << ','
            << r.warmup << ',' << detail::fmt_double(r.median_time) << ','
            << detail::fmt_double(r.min_time) << ',' << detail::fmt_double(r.checksum) << ','
            << r.features.nnz << ',' << r.features.mat_size << ','
            << detail::fmt_double(r.features.std_row) << "\n";
    }

    static BenchRecord parse_row(const std::string& line, std::size_t lineno) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != 11)
            throw std::runtime_error("RecordStore: line " + std::to_string(lineno) + " has " +
                                     std::to_string(cells.size()) + " fields, expected 11");
        try {
            BenchRecord r;
            r.matrix_id = cells[0];
            r.n_cols = std::stoll(cells[1]);
            const auto k = KernelId::parse(cells[2]);
            if (!k) throw std::invalid_argument("bad kernel '" + cells[2] + "'");
            r.kernel = *k;
            r.reps = std::stoi(cells[3]);
            r.warmup = std::stoi(cells[4]);
            r.median_time = std::stod(cells[5]);
            r.min_time = std::stod(cells[6]);
            r.checksum = std::stod(cells[7]);
            r.features.nnz = std::stoll(cells[8]);
            r.features.mat_size = std::stoll(cells[9]);
            r.features.std_row = std::stod(cells[10]);
            r.features.n_cols = r.n_cols;
            return r;
        } catch (const std::exception& e) {
            throw std::runtime_error("RecordStore: line " + std::to_string(lineno) + ": " +
                                     e.what());
        }
    }

    std::string path_;
    std::vector<BenchRecord> records_;
    std::map<std::string, std::size_t> keys_;
};

template <class T>
struct CorpusEntry {
    std::string id;
    CsrMatrix<T> matrix;
};

struct CorpusResult {
    std::vector<TrainingSample> samples;
    int new_measurements = 0;
    std::vector<std::string> failures;  // "<matrix>|<N>|<kernel>: reason"
};

/// Benchmarks every (matrix, N, kernel) triple not already in the store and
/// assembles one TrainingSample per (matrix, N). Dense operands are derived
/// deterministically from (matrix id, N), so resumed runs measure the same
/// problem. Kernel failures are recorded and skip that sample, not the run.
template <class T>
CorpusResult run_corpus(const std::vector<CorpusEntry<T>>& matrices,
                        const std::vector<Index>& n_values, const WorkerConfig& cfg,
                        RecordStore& store, const BenchOptions& opt = {}) {
    if (matrices.empty()) throw std::invalid_argument("run_corpus: empty corpus");
    if (n_values.empty()) throw std::invalid_argument("run_corpus: no N values");

    CorpusResult result;
    for (const auto& entry : matrices) {
        for (const Index n : n_values) {
            bool need_any = false;
            for (const auto k : all_kernels())
                if (!store.contains(entry.id, n, k)) need_any = true;

            DenseMatrix<T> x, x_cm, ref;
            if (need_any) {
                const std::uint64_t seed =
                    opt.x_seed ^ detail::fnv1a(entry.id) ^ (0x9e3779b97f4a7c15ull * n);
                x = DenseMatrix<T>::random(entry.matrix.num_cols, n, Layout::RowMajor, seed);
                x_cm = convert_layout(x, Layout::ColMajor);
                if (opt.verify) ref = spmm_reference(entry.matrix, x);
            }
            const auto features = extract_features(entry.matrix, n);

            std::array<double, kNumKernels> timings{};
            bool complete = true;
            for (const auto kernel : all_kernels()) {
                if (const BenchRecord* got = store.find(entry.id, n, kernel)) {
                    timings[kernel.index()] = got->median_time;
                    continue;
                }
                WorkerConfig kcfg = cfg;
                if (opt.auto_col_block) kcfg.col_block = recommended_col_block(kernel, n);
                const auto& xk = kernel.n == NChoice::RM ? x : x_cm;
                try {
                    auto rec = time_kernel_fn<T>(
                        [&] { return spmm(kernel, entry.matrix, xk, kcfg); },
                        opt.verify ? &ref : nullptr, entry.id, features, kernel, opt.reps,
                        opt.warmup);
                    timings[kernel.index()] = rec.median_time;
                    store.append(rec);
                    ++result.new_measurements;
                } catch (const std::exception& e) {
                    result.failures.push_back(entry.id + "|" + std::to_string(n) + "|" +
                                              kernel.name() + ": " + e.what());
                    complete = false;
                }
            }
            if (complete)
                result.samples.push_back(make_sample(features, timings, entry.id));
        }
    }
    return result;
}

}  // namespace spmmkit
