#pragma once

#include <bit>
#include <span>

#include "spmmkit/types.hpp"

namespace spmmkit {

namespace detail {

inline bool is_pow2(std::size_t w) { return w > 0 && std::has_single_bit(w); }

/// In-place adjacent-pair merge tree over `w` lanes of `lanes` values each
/// (lane-major storage). After log2(w) levels the first lane holds the sum.
/// Writing lane i from lanes 2i and 2i+1 is safe in place because writes
/// trail reads.
template <class T>
void tree_reduce_lanes(T* v, std::size_t w, std::size_t lanes) {
    for (std::size_t half = w / 2; half >= 1; half /= 2) {
        for (std::size_t i = 0; i < half; ++i)
            for (std::size_t c = 0; c < lanes; ++c)
                v[i * lanes + c] = v[2 * i * lanes + c] + v[(2 * i + 1) * lanes + c];
    }
}

/// Gated prefix-sum network over `w` lanes, combining from the right: a lane
/// absorbs its distance-d neighbor when both carry the same segment id, so
/// after log2(w) steps the first lane of each segment holds that segment's
/// total. Ascending i keeps in-place reads ahead of writes.
template <class T>
void conditional_scan_lanes(T* v, const Index* ids, std::size_t w, std::size_t lanes) {
    for (std::size_t d = 1; d < w; d *= 2) {
        for (std::size_t i = 0; i + d < w; ++i) {
            if (ids[i] == ids[i + d])
                for (std::size_t c = 0; c < lanes; ++c) v[i * lanes + c] += v[(i + d) * lanes + c];
        }
    }
}

}  // namespace detail

/// Sum of a power-of-two-length group via a fixed adjacent-pair merge tree:
/// [1,2,3,4] combines as [3,7] then [10]. The fixed shape makes the rounding
/// deterministic.
template <class T>
T tree_reduce(std::span<const T> values) {
    if (!detail::is_pow2(values.size()))
        throw std::invalid_argument("tree_reduce: length must be a power of two, got " +
                                    std::to_string(values.size()));
    if (values.size() == 1) return values[0];
    std::vector<T> buf(values.begin(), values.end());
    detail::tree_reduce_lanes(buf.data(), buf.size(), 1);
    return buf[0];
}

template <class T>
struct SegmentSum {
    Index segment = 0;
    T sum = T(0);
    friend bool operator==(const SegmentSum& a, const SegmentSum& b) {
        return a.segment == b.segment && a.sum == b.sum;
    }
};

/// Per-segment sums of one W-wide group plus a carry marker: the last
/// segment may continue into the next group, so its pair must be merged by
/// the caller.
template <class T>
struct ConditionalReduceResult {
    std::vector<SegmentSum<T>> sums;  // one per distinct segment id, in input order
    bool carry = false;               // set on the last pair (always, for nonempty input)
};

/// Segmented sum of one group of W values whose segment ids arrive in CSR
/// order (nondecreasing). Uses the gated prefix-sum network: a combine step
/// fires only when two lanes share the same segment id, and segment-start
/// lanes end up holding their segment's total.
template <class T>
ConditionalReduceResult<T> conditional_reduce(std::span<const T> values,
                                              std::span<const Index> segment_ids) {
    if (values.size() != segment_ids.size())
        throw std::invalid_argument("conditional_reduce: values and segment_ids differ in length");
    if (!detail::is_pow2(values.size()))
        throw std::invalid_argument("conditional_reduce: length must be a power of two, got " +
                                    std::to_string(values.size()));
    for (std::size_t i = 1; i < segment_ids.size(); ++i)
        if (segment_ids[i] < segment_ids[i - 1])
            throw std::invalid_argument("conditional_reduce: segment_ids decreasing at index " +
                                        std::to_string(i));

    std::vector<T> buf(values.begin(), values.end());
    detail::conditional_scan_lanes(buf.data(), segment_ids.data(), buf.size(), 1);

    ConditionalReduceResult<T> result;
    for (std::size_t i = 0; i < buf.size(); ++i) {
        if (i == 0 || segment_ids[i] != segment_ids[i - 1])
            result.sums.push_back({segment_ids[i], buf[i]});
    }
    result.carry = !result.sums.empty();
    return result;
}

}  // namespace spmmkit
