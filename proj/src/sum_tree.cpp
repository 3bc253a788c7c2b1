#include "meet/sum_tree.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "meet/errors.hpp"

namespace meet {

SumTree::SumTree(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) {
        throw std::invalid_argument("SumTree: capacity must be at least 1");
    }
    leaf_count_ = std::bit_ceil(capacity);
    sum_.assign(2 * leaf_count_, 0.0);
    max_.assign(2 * leaf_count_, 0.0);
}

void SumTree::set(std::size_t index, double priority) {
    if (index >= capacity_) {
        throw std::out_of_range("SumTree::set: index " + std::to_string(index) +
                                " >= capacity " + std::to_string(capacity_));
    }
    if (!std::isfinite(priority) || priority < 0.0) {
        throw std::invalid_argument("SumTree::set: priority must be finite and >= 0");
    }
    std::size_t node = leaf_count_ + index;
    sum_[node] = priority;
    max_[node] = priority;
    std::size_t writes = 1;
    for (node /= 2; node >= 1; node /= 2) {
        sum_[node] = sum_[2 * node] + sum_[2 * node + 1];
        max_[node] = std::max(max_[2 * node], max_[2 * node + 1]);
        ++writes;
    }
    last_writes_ = writes;
}

double SumTree::get(std::size_t index) const {
    if (index >= capacity_) {
        throw std::out_of_range("SumTree::get: index out of range");
    }
    return sum_[leaf_count_ + index];
}

std::size_t SumTree::sample_prefix(double u) const {
    const double tot = total();
    if (!(tot > 0.0)) {
        throw EmptyError("SumTree::sample_prefix: tree total is zero");
    }
    if (!(u >= 0.0 && u < tot)) {
        throw std::invalid_argument("SumTree::sample_prefix: u outside [0, total)");
    }
    std::size_t node = 1;
    while (node < leaf_count_) {
        const std::size_t left = 2 * node;
        const double left_sum = sum_[left];
        if (u < left_sum) {
            node = left;
        } else if (sum_[left + 1] > 0.0) {
            u -= left_sum;
            node = left + 1;
        } else {
            // Rounding pushed u past the last positive leaf of this subtree.
            u = std::nextafter(left_sum, 0.0);
            node = left;
        }
    }
    return node - leaf_count_;
}

}  // namespace meet
