#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace spmmkit {

enum class MChoice : std::uint8_t { RB = 0, EB = 1 };  // row balance / element balance
enum class NChoice : std::uint8_t { RM = 0, CM = 1 };  // row-major / column-major X
enum class KChoice : std::uint8_t { SR = 0, PR = 1 };  // sequential / parallel reduction

/// One point in the 2x2x2 design space. The canonical index is the
/// lexicographic order RB<EB, RM<CM, SR<PR, giving labels 0..7:
///   0 RB+RM+SR  1 RB+RM+PR  2 RB+CM+SR  3 RB+CM+PR
///   4 EB+RM+SR  5 EB+RM+PR  6 EB+CM+SR  7 EB+CM+PR
struct KernelId {
    MChoice m = MChoice::RB;
    NChoice n = NChoice::RM;
    KChoice k = KChoice::SR;

    int index() const {
        return static_cast<int>(m) * 4 + static_cast<int>(n) * 2 + static_cast<int>(k);
    }

    static KernelId from_index(int idx) {
        if (idx < 0 || idx > 7) throw std::out_of_range("KernelId index must be 0..7");
        return {static_cast<MChoice>(idx / 4), static_cast<NChoice>((idx / 2) % 2),
                static_cast<KChoice>(idx % 2)};
    }

    std::string name() const {
        std::string s;
        s += (m == MChoice::RB) ? "RB" : "EB";
        s += '+';
        s += (n == NChoice::RM) ? "RM" : "CM";
        s += '+';
        s += (k == KChoice::SR) ? "SR" : "PR";
        return s;
    }

    static std::optional<KernelId> parse(std::string_view s) {
        if (s.size() != 8 || s[2] != '+' || s[5] != '+') return std::nullopt;
        KernelId id;
        const auto mm = s.substr(0, 2), nn = s.substr(3, 2), kk = s.substr(6, 2);
        if (mm == "RB") id.m = MChoice::RB;
        else if (mm == "EB") id.m = MChoice::EB;
        else return std::nullopt;
        if (nn == "RM") id.n = NChoice::RM;
        else if (nn == "CM") id.n = NChoice::CM;
        else return std::nullopt;
        if (kk == "SR") id.k = KChoice::SR;
        else if (kk == "PR") id.k = KChoice::PR;
        else return std::nullopt;
        return id;
    }

    friend bool operator==(const KernelId& a, const KernelId& b) {
        return a.index() == b.index();
    }
    friend bool operator!=(const KernelId& a, const KernelId& b) { return !(a == b); }
    friend bool operator<(const KernelId& a, const KernelId& b) {
        return a.index() < b.index();
    }
};

inline constexpr int kNumKernels = 8;

inline std::array<KernelId, kNumKernels> all_kernels() {
    std::array<KernelId, kNumKernels> out;
    for (int i = 0; i < kNumKernels; ++i) out[i] = KernelId::from_index(i);
    return out;
}

/// Projects an 8-way kernel label onto one loop dimension (0 = M-loop,
/// 1 = N-loop, 2 = K-loop), yielding a binary label for per-dimension models.
inline int project_label(KernelId id, int dimension) {
    switch (dimension) {
        case 0: return static_cast<int>(id.m);
        case 1: return static_cast<int>(id.n);
        case 2: return static_cast<int>(id.k);
        default: throw std::out_of_range("project_label: dimension must be 0..2");
    }
}

}  // namespace spmmkit
