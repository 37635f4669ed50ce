// Ordered partitions d = (d_1,...,d_n) of nonnegative integers, their
// canonical (sorted) form used as memo keys, the dimension-shell test,
// and lazy lexicographic enumerators for Pi(m,n) and the restricted
// family Pi_L(m,n).
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace psi {

using Part = long long;
using Partition = std::vector<Part>;

inline Part part_sum(const Partition& d) {
    return std::accumulate(d.begin(), d.end(), Part{0});
}

// Canonical form: same multiset, sorted non-increasing.
inline Partition canonicalize(Partition d) {
    std::sort(d.begin(), d.end(), std::greater<Part>());
    return d;
}

// True iff sum(d) = 3g-3+n and (g,n) is stable. Correlators off this
// shell vanish; the unstable (0,1) and (0,2) cases are zero by convention.
inline bool dimension_ok(long long g, const Partition& d) {
    const auto n = static_cast<long long>(d.size());
    if (g < 0 || n < 1)
        return false;
    if (g == 0 && n <= 2)
        return false;
    return part_sum(d) == 3 * g - 3 + n;
}

// Memoization identity for a correlator: genus plus the canonical part
// multiset. Correlators are invariant under permutations of the entries,
// so two keys compare equal iff the correlators coincide structurally.
struct CorrelatorKey {
    long long genus = 0;
    Partition parts;  // sorted non-increasing

    static CorrelatorKey of(long long g, const Partition& d) {
        return CorrelatorKey{g, canonicalize(d)};
    }
    friend bool operator==(const CorrelatorKey&, const CorrelatorKey&) = default;
    friend bool operator<(const CorrelatorKey& a, const CorrelatorKey& b) {
        if (a.genus != b.genus)
            return a.genus < b.genus;
        return a.parts < b.parts;
    }
};

struct CorrelatorKeyHash {
    std::size_t operator()(const CorrelatorKey& k) const noexcept {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(k.genus);
        for (Part p : k.parts) {
            h ^= static_cast<std::uint64_t>(p) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            h *= 0xff51afd7ed558ccdULL;
        }
        return static_cast<std::size_t>(h ^ (h >> 33));
    }
};

// Text form used by CLI arguments, cache records and CSV rows: "3,1,0".
inline std::string to_text(const Partition& d) {
    std::string s;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (i)
            s += ',';
        s += std::to_string(d[i]);
    }
    return s;
}

inline Partition partition_from_text(std::string_view text) {
    Partition d;
    if (text.empty())
        throw std::invalid_argument("partition: empty text");
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto piece = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos
                                                                            : comma - pos);
        if (piece.empty())
            throw std::invalid_argument("partition: empty entry in '" + std::string(text) + "'");
        Part value = 0;
        for (char c : piece) {
            if (c < '0' || c > '9')
                throw std::invalid_argument("partition: bad entry '" + std::string(piece) + "'");
            value = value * 10 + (c - '0');
        }
        d.push_back(value);
        if (comma == std::string_view::npos)
            break;
        pos = comma + 1;
    }
    return d;
}

// Lazy stream of Pi(m,n): every ordered n-tuple of nonnegative integers
// summing to m, in ascending lexicographic order, each exactly once.
// Total count is C(m+n-1, n-1).
class PartitionEnumerator {
  public:
    PartitionEnumerator(Part m, int n) : m_(m), n_(n) {
        if (m < 0 || n < 1)
            throw std::invalid_argument("PartitionEnumerator: need m >= 0 and n >= 1");
    }

    bool next(Partition& out) {
        if (done_)
            return false;
        if (!started_) {
            cur_.assign(static_cast<std::size_t>(n_), 0);
            cur_.back() = m_;
            started_ = true;
            out = cur_;
            return true;
        }
        // successor: move one unit of mass leftwards, flush the rest right
        std::size_t p = cur_.size();
        while (p > 0 && cur_[p - 1] == 0)
            --p;
        if (p <= 1) {
            done_ = true;  // (m,0,...,0) is the last tuple
            return false;
        }
        const Part moved = cur_[p - 1] - 1;
        cur_[p - 1] = 0;
        cur_[p - 2] += 1;
        cur_.back() = moved;
        out = cur_;
        return true;
    }

  private:
    Part m_;
    int n_;
    Partition cur_;
    bool started_ = false;
    bool done_ = false;
};

// Lazy stream of Pi_L(m,n) = { d in Pi(m,n) : d_1+...+d_{n-2} <= L },
// ascending lexicographic. For n in {1,2} the constraint is void and the
// stream is all of Pi(m,n), matching the convention for 1- and 2-point
// families.
class PiLEnumerator {
  public:
    PiLEnumerator(Part m, int n, Part L) : m_(m), n_(n), cap_(std::min(L, m)) {
        if (m < 0 || n < 1 || L < 0)
            throw std::invalid_argument("PiLEnumerator: need m >= 0, n >= 1, L >= 0");
        if (n_ <= 2)
            plain_.emplace(m_, n_);
    }

    bool next(Partition& out) {
        if (plain_)
            return plain_->next(out);
        if (done_)
            return false;
        if (!started_) {
            prefix_.assign(static_cast<std::size_t>(n_ - 2), 0);
            prefix_sum_ = 0;
            tail_first_ = 0;
            started_ = true;
        } else if (!advance_tail() && !advance_prefix()) {
            done_ = true;
            return false;
        }
        out.assign(prefix_.begin(), prefix_.end());
        out.push_back(tail_first_);
        out.push_back(m_ - prefix_sum_ - tail_first_);
        return true;
    }

  private:
    bool advance_tail() {
        if (tail_first_ >= m_ - prefix_sum_)
            return false;
        ++tail_first_;
        return true;
    }

    // bounded odometer over prefixes with sum <= cap_, lex order
    bool advance_prefix() {
        for (std::size_t i = prefix_.size(); i-- > 0;) {
            if (prefix_sum_ + 1 - trailing_sum(i) <= cap_) {
                prefix_sum_ = prefix_sum_ - trailing_sum(i) + 1;
                prefix_[i] += 1;
                for (std::size_t j = i + 1; j < prefix_.size(); ++j)
                    prefix_[j] = 0;
                tail_first_ = 0;
                return true;
            }
            // carry past position i
        }
        return false;
    }

    Part trailing_sum(std::size_t i) const {
        Part s = 0;
        for (std::size_t j = i + 1; j < prefix_.size(); ++j)
            s += prefix_[j];
        return s;
    }

    Part m_;
    int n_;
    Part cap_;
    std::optional<PartitionEnumerator> plain_;
    Partition prefix_;
    Part prefix_sum_ = 0;
    Part tail_first_ = 0;
    bool started_ = false;
    bool done_ = false;
};

}  // namespace psi
