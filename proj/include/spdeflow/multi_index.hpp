#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace spdeflow {

/// Multi-index k = (k_1, ..., k_d) of non-negative integers.
///
/// Total degree |k| = k_1 + ... + k_d. Orderings and hashing are provided so
/// multi-indices can be used as map keys; the canonical basis ordering is
/// graded lexicographic (compare |k| first, ties broken lexicographically).
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(int d) : k_(static_cast<std::size_t>(d), 0) {
        if (d < 1) throw std::invalid_argument("MultiIndex: dimension must be >= 1");
    }
    MultiIndex(std::initializer_list<int> entries) : k_(entries) { validate(); }
    explicit MultiIndex(std::vector<int> entries) : k_(std::move(entries)) { validate(); }

    int dim() const { return static_cast<int>(k_.size()); }
    int order() const {
        int s = 0;
        for (int v : k_) s += v;
        return s;
    }

    int operator[](int i) const { return k_[static_cast<std::size_t>(i)]; }
    int& operator[](int i) { return k_[static_cast<std::size_t>(i)]; }

    const std::vector<int>& entries() const { return k_; }

    /// Unit multi-index e_axis in dimension d.
    static MultiIndex unit(int d, int axis) {
        MultiIndex m(d);
        m[axis] = 1;
        return m;
    }

    MultiIndex raised(int axis) const {
        MultiIndex m = *this;
        m[axis] += 1;
        return m;
    }

    /// Lowered index, or dim-0 sentinel when the entry is already zero.
    bool can_lower(int axis) const { return k_[static_cast<std::size_t>(axis)] > 0; }
    MultiIndex lowered(int axis) const {
        MultiIndex m = *this;
        m[axis] -= 1;
        return m;
    }

    bool operator==(const MultiIndex& o) const { return k_ == o.k_; }
    bool operator!=(const MultiIndex& o) const { return k_ != o.k_; }

    /// Graded lexicographic order: by |k|, then lexicographic.
    bool graded_less(const MultiIndex& o) const {
        const int a = order(), b = o.order();
        if (a != b) return a < b;
        return k_ < o.k_;
    }

    /// <= in the componentwise (partial) order.
    bool leq_componentwise(const MultiIndex& o) const {
        if (dim() != o.dim()) return false;
        for (int i = 0; i < dim(); ++i)
            if (k_[static_cast<std::size_t>(i)] > o[i]) return false;
        return true;
    }

    std::string to_string() const {
        std::string s = "(";
        for (std::size_t i = 0; i < k_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(k_[i]);
        }
        return s + ")";
    }

private:
    void validate() const {
        if (k_.empty()) throw std::invalid_argument("MultiIndex: empty");
        for (int v : k_)
            if (v < 0) throw std::invalid_argument("MultiIndex: negative entry");
    }

    std::vector<int> k_;
};

struct MultiIndexHash {
    std::size_t operator()(const MultiIndex& m) const {
        // FNV-1a over the entries; entries are small non-negative ints.
        std::uint64_t h = 1469598103934665603ull;
        for (int v : m.entries()) {
            h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

struct MultiIndexGradedLess {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const { return a.graded_less(b); }
};

/// All multi-indices of dimension d with |k| <= max_order, in graded lex order.
std::vector<MultiIndex> enumerate_multi_indices(int d, int max_order);

/// Number of multi-indices of dimension d with |k| <= max_order, i.e. C(max_order + d, d).
std::size_t multi_index_count(int d, int max_order);

}  // namespace spdeflow
