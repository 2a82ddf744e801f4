#ifndef MVHG_PARTITIONS_HPP
#define MVHG_PARTITIONS_HPP

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "mvhg/common.hpp"

namespace mvhg {

// An integer partition kappa = (k1 >= k2 >= ... >= kp > 0). Immutable value
// object; usable as an ordered map key (lexicographic compare).
class Partition {
  public:
    Partition() = default;

    explicit Partition(std::vector<int> parts) : parts_(std::move(parts)) {
        while (!parts_.empty() && parts_.back() == 0) parts_.pop_back();
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            if (parts_[i] <= 0)
                throw DomainError("Partition: parts must be positive");
            if (i > 0 && parts_[i] > parts_[i - 1])
                throw DomainError("Partition: parts must be non-increasing");
        }
        weight_ = std::accumulate(parts_.begin(), parts_.end(), 0);
    }

    Partition(std::initializer_list<int> parts)
        : Partition(std::vector<int>(parts)) {}

    int weight() const { return weight_; }
    // Number of nonzero parts.
    int size() const { return static_cast<int>(parts_.size()); }
    bool empty() const { return parts_.empty(); }
    // 1-indexed part; zero beyond the stored length.
    int part(int i) const {
        return (i >= 1 && i <= size()) ? parts_[static_cast<std::size_t>(i - 1)] : 0;
    }
    int first() const { return parts_.empty() ? 0 : parts_.front(); }
    const std::vector<int>& parts() const { return parts_; }

    friend bool operator==(const Partition& a, const Partition& b) {
        return a.parts_ == b.parts_;
    }
    friend std::strong_ordering operator<=>(const Partition& a, const Partition& b) {
        return a.parts_ <=> b.parts_;
    }

    std::string to_string() const {
        std::ostringstream os;
        os << '(';
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            if (i) os << ',';
            os << parts_[i];
        }
        os << ')';
        return os.str();
    }

  private:
    std::vector<int> parts_;
    int weight_ = 0;
};

// True when lhs is dominated by rhs (same weight, every prefix sum of lhs
// <= the corresponding prefix sum of rhs).
inline bool dominated_by(const Partition& lhs, const Partition& rhs) {
    if (lhs.weight() != rhs.weight()) return false;
    int sl = 0, sr = 0;
    int n = std::max(lhs.size(), rhs.size());
    for (int i = 1; i <= n; ++i) {
        sl += lhs.part(i);
        sr += rhs.part(i);
        if (sl > sr) return false;
    }
    return true;
}

namespace detail {
inline void enumerate_rec(int remaining, int max_part, int max_parts,
                          std::vector<int>& acc, std::vector<Partition>& out) {
    if (remaining == 0) {
        out.emplace_back(acc);
        return;
    }
    if (max_parts == 0) return;
    for (int p = std::min(remaining, max_part); p >= 1; --p) {
        acc.push_back(p);
        enumerate_rec(remaining - p, p, max_parts - 1, acc, out);
        acc.pop_back();
    }
}
}  // namespace detail

// All partitions of k with at most max_parts nonzero parts, in reverse
// lexicographic order (largest first part first). k = 0 yields the single
// empty partition.
inline std::vector<Partition> enumerate_partitions(int k, int max_parts) {
    if (k < 0) throw DomainError("enumerate_partitions: k must be >= 0");
    if (max_parts < 1) throw DomainError("enumerate_partitions: max_parts must be >= 1");
    std::vector<Partition> out;
    std::vector<int> acc;
    detail::enumerate_rec(k, k, max_parts, acc, out);
    return out;
}

// p(k, <= max_parts) by the standard two-way recurrence; used to pre-size
// coefficient tables without enumerating.
inline std::int64_t partition_count(int k, int max_parts) {
    if (k < 0) throw DomainError("partition_count: k must be >= 0");
    if (max_parts < 1) throw DomainError("partition_count: max_parts must be >= 1");
    // table[j][n] = number of partitions of n into at most j parts
    std::vector<std::vector<std::int64_t>> table(
        static_cast<std::size_t>(max_parts) + 1,
        std::vector<std::int64_t>(static_cast<std::size_t>(k) + 1, 0));
    for (int j = 0; j <= max_parts; ++j) table[static_cast<std::size_t>(j)][0] = 1;
    for (int j = 1; j <= max_parts; ++j)
        for (int n = 1; n <= k; ++n) {
            auto& t = table[static_cast<std::size_t>(j)][static_cast<std::size_t>(n)];
            t = table[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(n)];
            if (n >= j) t += table[static_cast<std::size_t>(j)][static_cast<std::size_t>(n - j)];
        }
    return table[static_cast<std::size_t>(max_parts)][static_cast<std::size_t>(k)];
}

}  // namespace mvhg

#endif
