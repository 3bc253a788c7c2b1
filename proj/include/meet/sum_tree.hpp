#pragma once

#include <cstddef>
#include <vector>

namespace meet {

/// Binary sum tree over non-negative priorities.
///
/// Leaves are padded up to a power of two; padding leaves hold zero. Every
/// update rewrites the leaf and recomputes each ancestor from its two
/// children, so partial sums never accumulate drift. A parallel max tree is
/// kept along the same path so the largest stored priority is O(1) to read.
class SumTree {
public:
    explicit SumTree(std::size_t capacity);

    std::size_t capacity() const { return capacity_; }

    void set(std::size_t index, double priority);
    double get(std::size_t index) const;

    double total() const { return sum_[1]; }
    double max() const { return max_[1]; }

    /// Index i with prefix(i) <= u < prefix(i + 1); u on a boundary goes right.
    std::size_t sample_prefix(double u) const;

    /// Sum-node writes performed by the most recent set().
    std::size_t last_update_writes() const { return last_writes_; }

private:
    std::size_t capacity_;
    std::size_t leaf_count_;
    std::vector<double> sum_;
    std::vector<double> max_;
    std::size_t last_writes_ = 0;
};

}  // namespace meet
