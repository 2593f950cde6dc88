#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fdms/error.hpp"

namespace fdms {

/// Ordered selection of joint indices (0-based) from a hand's joint space.
/// Always nonempty and strictly increasing.
class JointSubset {
public:
    JointSubset() = default;

    explicit JointSubset(std::vector<std::size_t> indices) : indices_(std::move(indices))
    {
        require(!indices_.empty(), ErrorCode::InvalidArgument, "joint subset must be nonempty");
        for (std::size_t i = 1; i < indices_.size(); ++i)
            require(indices_[i - 1] < indices_[i], ErrorCode::InvalidArgument,
                    "joint subset indices must be strictly increasing");
    }

    static JointSubset full(std::size_t d)
    {
        std::vector<std::size_t> all(d);
        for (std::size_t i = 0; i < d; ++i)
            all[i] = i;
        return JointSubset(std::move(all));
    }

    const std::vector<std::size_t>& indices() const noexcept { return indices_; }
    std::size_t size() const noexcept { return indices_.size(); }
    bool empty() const noexcept { return indices_.empty(); }
    std::size_t operator[](std::size_t i) const { return indices_[i]; }
    std::size_t back() const { return indices_.back(); }

    bool contains(std::size_t joint) const
    {
        for (auto j : indices_)
            if (j == joint)
                return true;
        return false;
    }

    bool is_full(std::size_t d) const { return indices_.size() == d && (d == 0 || indices_.back() == d - 1); }

    /// Joint indices in [0, d) not in this subset, ascending.
    std::vector<std::size_t> complement(std::size_t d) const
    {
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < d; ++j)
            if (!contains(j))
                out.push_back(j);
        return out;
    }

    void check_within(std::size_t d) const
    {
        require(!indices_.empty(), ErrorCode::InvalidArgument, "joint subset must be nonempty");
        require(indices_.back() < d, ErrorCode::OutOfRange,
                "joint index " + std::to_string(indices_.back()) + " out of bounds for d=" + std::to_string(d));
    }

    friend bool operator==(const JointSubset&, const JointSubset&) = default;

private:
    std::vector<std::size_t> indices_;
};

} // namespace fdms
