#pragma once

#include <atomic>
#include <cmath>

#include "spmmkit/kernel_id.hpp"
#include "spmmkit/partition.hpp"
#include "spmmkit/reduce.hpp"
#include "spmmkit/types.hpp"
#include "spmmkit/worker.hpp"

namespace spmmkit {

/// Oracle: sequential triple loop in row order with left-to-right
/// accumulation. Accepts either dense layout; always returns RowMajor.
template <class T>
DenseMatrix<T> spmm_reference(const CsrMatrix<T>& a, const DenseMatrix<T>& x) {
    if (a.num_cols != x.num_rows)
        throw std::invalid_argument("spmm_reference: A is " + std::to_string(a.num_rows) +
                                    "x" + std::to_string(a.num_cols) + " but X has " +
                                    std::to_string(x.num_rows) + " rows");
    DenseMatrix<T> y(a.num_rows, x.num_cols, Layout::RowMajor);
    for (Index m = 0; m < a.num_rows; ++m) {
        for (Index n = 0; n < x.num_cols; ++n) {
            T acc = T(0);
            for (Index e = a.row_offsets[m]; e < a.row_offsets[m + 1]; ++e)
                acc += a.values[e] * x.at(a.col_indices[e], n);
            y.at(m, n) = acc;
        }
    }
    return y;
}

namespace detail {

/// One worker's share of the multiply, with every design-space choice fixed
/// at compile time. All variants share the same skeleton: stage a segment of
/// up to seg_cap nonzeros into small local buffers, then sweep it once per
/// column block, so staged elements are reused across C columns.
template <class T, MChoice M, NChoice NL, KChoice K>
void spmm_worker(const CsrMatrix<T>& a, const DenseMatrix<T>& x, DenseMatrix<T>& y,
                 const WorkerConfig& cfg, const ElementPartition* part, Index w) {
    const Index n = x.num_cols;
    const Index width = cfg.group_width;
    // Column-major X makes consecutive rows of one column adjacent, so the
    // multi-column block load is dropped there and columns go one at a time.
    const Index block = NL == NChoice::CM ? 1 : std::min(cfg.col_block, std::max<Index>(n, 1));
    // Power-of-two staging size aligned to the group width, so only the final
    // group of a chunk can be a partial one.
    const Index seg_cap = std::max<Index>(width, 256);

    const T* xd = x.data.data();
    T* yd = y.data.data();
    const auto xval = [&](Index k, Index c) -> T {
        if constexpr (NL == NChoice::RM)
            return xd[static_cast<std::size_t>(k) * n + c];
        else
            return xd[static_cast<std::size_t>(c) * x.num_rows + k];
    };

    std::vector<Index> seg_cols(seg_cap);
    std::vector<T> seg_vals(seg_cap);
    std::vector<T> lanes;  // group scratch, lane-major: W lanes x block columns
    if constexpr (K == KChoice::PR) lanes.resize(static_cast<std::size_t>(width) * block);

    if constexpr (M == MChoice::RB) {
        // Contiguous blocks of rows, balanced by row count; each worker owns
        // its output rows outright and accumulates straight into them.
        const Index base = a.num_rows / cfg.num_workers;
        const Index extra = a.num_rows % cfg.num_workers;
        const Index r0 = w * base + std::min(w, extra);
        const Index r1 = r0 + base + (w < extra ? 1 : 0);

        for (Index r = r0; r < r1; ++r) {
            const Index row_end = a.row_offsets[r + 1];
            for (Index s = a.row_offsets[r]; s < row_end; s += seg_cap) {
                const Index slen = std::min(seg_cap, row_end - s);
                for (Index i = 0; i < slen; ++i) {
                    seg_cols[i] = a.col_indices[s + i];
                    seg_vals[i] = a.values[s + i];
                }
                for (Index c0 = 0; c0 < n; c0 += block) {
                    const Index cw = std::min(block, n - c0);
                    T* yrow = yd + static_cast<std::size_t>(r) * n + c0;
                    if constexpr (K == KChoice::SR) {
                        for (Index i = 0; i < slen; ++i)
                            for (Index c = 0; c < cw; ++c)
                                yrow[c] += seg_vals[i] * xval(seg_cols[i], c0 + c);
                    } else {
                        // Group-sized tiles through the row; the fixed merge
                        // tree per tile plus the carried row accumulator keep
                        // rounding deterministic for any row length.
                        for (Index g = 0; g < slen; g += width) {
                            const Index glen = std::min(width, slen - g);
                            for (Index l = 0; l < glen; ++l)
                                for (Index c = 0; c < cw; ++c)
                                    lanes[l * cw + c] =
                                        seg_vals[g + l] * xval(seg_cols[g + l], c0 + c);
                            for (Index l = glen; l < width; ++l)
                                for (Index c = 0; c < cw; ++c) lanes[l * cw + c] = T(0);
                            tree_reduce_lanes(lanes.data(), width, cw);
                            for (Index c = 0; c < cw; ++c) yrow[c] += lanes[c];
                        }
                    }
                }
            }
        }
    } else {
        // Element-balanced chunk. Rows fully inside the chunk are this
        // worker's alone and take plain stores; rows crossing a chunk edge
        // are merged with synchronized adds.
        const Index e0 = part->chunk_bounds[w].begin;
        const Index e1 = part->chunk_bounds[w].end;
        if (e0 >= e1) return;

        const auto owns = [&](Index row) {
            return a.row_offsets[row] >= e0 && a.row_offsets[row + 1] <= e1;
        };
        const auto deposit = [&](Index row, const T* v, Index c0, Index cw) {
            T* yrow = yd + static_cast<std::size_t>(row) * n + c0;
            if (owns(row)) {
                for (Index c = 0; c < cw; ++c) yrow[c] += v[c];
            } else {
                for (Index c = 0; c < cw; ++c)
                    std::atomic_ref<T>(yrow[c]).fetch_add(v[c], std::memory_order_relaxed);
            }
        };

        std::vector<Index> seg_rows(seg_cap);
        std::vector<Index> lane_ids;
        std::vector<T> acc;
        if constexpr (K == KChoice::PR) lane_ids.resize(width);
        if constexpr (K == KChoice::SR) acc.resize(block);
        const Index sentinel = a.num_rows;  // padding id, larger than any row

        Index r = part->row_of_chunk_start[w];
        for (Index s = e0; s < e1; s += seg_cap) {
            const Index slen = std::min(seg_cap, e1 - s);
            for (Index i = 0; i < slen; ++i) {
                while (a.row_offsets[r + 1] <= s + i) ++r;  // steps over empty rows
                seg_rows[i] = r;
                seg_cols[i] = a.col_indices[s + i];
                seg_vals[i] = a.values[s + i];
            }
            if constexpr (K == KChoice::SR) {
                for (Index c0 = 0; c0 < n; c0 += block) {
                    const Index cw = std::min(block, n - c0);
                    Index cur = -1;
                    for (Index i = 0; i < slen; ++i) {
                        if (seg_rows[i] != cur) {
                            if (cur >= 0) deposit(cur, acc.data(), c0, cw);
                            cur = seg_rows[i];
                            std::fill(acc.begin(), acc.begin() + cw, T(0));
                        }
                        for (Index c = 0; c < cw; ++c)
                            acc[c] += seg_vals[i] * xval(seg_cols[i], c0 + c);
                    }
                    if (cur >= 0) deposit(cur, acc.data(), c0, cw);
                }
            } else {
                // Groups may straddle rows: the gated prefix-sum network sums
                // each row's run in place, and the lane that starts a run
                // carries that row's partial.
                for (Index g = 0; g < slen; g += width) {
                    const Index glen = std::min(width, slen - g);
                    for (Index l = 0; l < glen; ++l) lane_ids[l] = seg_rows[g + l];
                    for (Index l = glen; l < width; ++l) lane_ids[l] = sentinel;
                    for (Index c0 = 0; c0 < n; c0 += block) {
                        const Index cw = std::min(block, n - c0);
                        for (Index l = 0; l < glen; ++l)
                            for (Index c = 0; c < cw; ++c)
                                lanes[l * cw + c] =
                                    seg_vals[g + l] * xval(seg_cols[g + l], c0 + c);
                        for (Index l = glen; l < width; ++l)
                            for (Index c = 0; c < cw; ++c) lanes[l * cw + c] = T(0);
                        conditional_scan_lanes(lanes.data(), lane_ids.data(), width, cw);
                        for (Index l = 0; l < width; ++l) {
                            if (lane_ids[l] == sentinel) break;  // padding suffix
                            if (l == 0 || lane_ids[l] != lane_ids[l - 1])
                                deposit(lane_ids[l], &lanes[l * cw], c0, cw);
                        }
                    }
                }
            }
        }
    }
}

}  // namespace detail

/// Runs one of the eight design-space kernels. X's layout must match the
/// kernel's N-loop choice; the result is always RowMajor and agrees with
/// spmm_reference within tolerance.
template <class T>
DenseMatrix<T> spmm(KernelId kernel, const CsrMatrix<T>& a, const DenseMatrix<T>& x,
                    const WorkerConfig& cfg) {
    if (const auto issues = validate(cfg); !issues.empty()) {
        std::string msg = "spmm: invalid config";
        for (const auto& s : issues) msg += "; " + s;
        throw std::invalid_argument(msg);
    }
    if (a.num_cols != x.num_rows)
        throw std::invalid_argument("spmm: A is " + std::to_string(a.num_rows) + "x" +
                                    std::to_string(a.num_cols) + " but X has " +
                                    std::to_string(x.num_rows) + " rows");
    const Layout want = kernel.n == NChoice::RM ? Layout::RowMajor : Layout::ColMajor;
    if (x.layout != want)
        throw std::invalid_argument("spmm: kernel " + kernel.name() + " needs " +
                                    layout_name(want) + " X, got " + layout_name(x.layout));

    DenseMatrix<T> y(a.num_rows, x.num_cols, Layout::RowMajor);
    ElementPartition part;
    if (kernel.m == MChoice::EB)
        part = partition_elements(a, static_cast<int>(cfg.num_workers));
    const ElementPartition* pp = kernel.m == MChoice::EB ? &part : nullptr;

    const auto run = [&](auto body) {
        detail::parallel_run(cfg.num_workers, [&](Index w) { body(w); });
    };
    switch (kernel.index()) {
        case 0:
            run([&](Index w) {
                detail::spmm_worker<T, MChoice::RB, NChoice::RM, KChoice::SR>(a, x, y, cfg,
                                                                              pp, w);
            });
            break;
        case 1:
            run([&](Index w) {
                detail::spmm_worker<T, MChoice::RB, NChoice::RM, KChoice::PR>(a, x, y, cfg,
                                                                              pp, w);
            });
            break;
        case 2:
            run([&](Index w) {
                detail::spmm_worker<T, MChoice::RB, NChoice::CM, KChoice::SR>(a, x, y, cfg,
                                                                              pp, w);
            });
            break;
        case 3:
            run([&](Index w) {
                detail::spmm_worker<T, MChoice::RB, NChoice::CM, KChoice::PR>(a, x, y, cfg,
                                                                              pp, w);
            });
            break;
        case 4:
            run([&](Index w) {
                detail::spmm_worker<T, MChoice::EB, NChoice::RM, KChoice::SR>(a, x, y, cfg,
                                                                              pp, w);
            });
            break;
        case 5:
            run([&](Index w) {
                detail::spmm_worker<T, MChoice::EB, NChoice::RM, KChoice::PR>(a, x, y, cfg,
                                                                              pp, w);
            });
            break;
        case 6:
            run([&](Index w) {
                detail::spmm_worker<T, MChoice::EB, NChoice::CM, KChoice::SR>(a, x, y, cfg,
                                                                              pp, w);
            });
            break;
        default:
            run([&](Index w) {
                detail::spmm_worker<T, MChoice::EB, NChoice::CM, KChoice::PR>(a, x, y, cfg,
                                                                              pp, w);
            });
            break;
    }
    return y;
}

/// Convenience overload: lays X out as the kernel requires, then runs it.
/// Conversion cost is the caller's concern when timing.
template <class T>
DenseMatrix<T> spmm_auto_layout(KernelId kernel, const CsrMatrix<T>& a,
                                const DenseMatrix<T>& x, const WorkerConfig& cfg) {
    const Layout want = kernel.n == NChoice::RM ? Layout::RowMajor : Layout::ColMajor;
    if (x.layout == want) return spmm(kernel, a, x, cfg);
    return spmm(kernel, a, convert_layout(x, want), cfg);
}

/// Comparison tolerances for kernel-vs-reference checks, per scalar width.
template <class T>
struct Tolerance;
template <>
struct Tolerance<double> {
    static constexpr double rtol = 1e-10;
    static constexpr double atol = 1e-12;
};
template <>
struct Tolerance<float> {
    static constexpr double rtol = 1e-3;
    static constexpr double atol = 1e-6;
};

/// True when every element satisfies |y - ref| <= atol + rtol*|ref|.
template <class T>
bool tolerance_equal(const DenseMatrix<T>& y, const DenseMatrix<T>& ref,
                     double rtol = Tolerance<T>::rtol, double atol = Tolerance<T>::atol) {
    if (y.num_rows != ref.num_rows || y.num_cols != ref.num_cols) return false;
    for (Index r = 0; r < y.num_rows; ++r)
        for (Index c = 0; c < y.num_cols; ++c) {
            const double a = static_cast<double>(y.at(r, c));
            const double b = static_cast<double>(ref.at(r, c));
            if (std::abs(a - b) > atol + rtol * std::abs(b)) return false;
        }
    return true;
}

}  // namespace spmmkit
