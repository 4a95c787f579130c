#include "spdeflow/multi_index.hpp"

namespace spdeflow {

namespace {

// Indices of grade n, ascending lexicographic in the entry vector.
void enumerate_grade(int d, int axis, int remaining, MultiIndex& cur, std::vector<MultiIndex>& out) {
    if (axis == d - 1) {
        cur[axis] = remaining;
        out.push_back(cur);
        cur[axis] = 0;
        return;
    }
    for (int v = 0; v <= remaining; ++v) {
        cur[axis] = v;
        enumerate_grade(d, axis + 1, remaining - v, cur, out);
    }
    cur[axis] = 0;
}

}  // namespace

std::vector<MultiIndex> enumerate_multi_indices(int d, int max_order) {
    if (d < 1) throw std::invalid_argument("enumerate_multi_indices: d must be >= 1");
    if (max_order < 0) throw std::invalid_argument("enumerate_multi_indices: max_order must be >= 0");
    std::vector<MultiIndex> out;
    out.reserve(multi_index_count(d, max_order));
    MultiIndex cur(d);
    for (int n = 0; n <= max_order; ++n) enumerate_grade(d, 0, n, cur, out);
    return out;
}

std::size_t multi_index_count(int d, int max_order) {
    std::size_t num = 1;
    for (int i = 1; i <= d; ++i)
        num = num * static_cast<std::size_t>(max_order + i) / static_cast<std::size_t>(i);
    return num;
}

}  // namespace spdeflow
