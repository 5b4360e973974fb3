#pragma once

#include <vector>

#include "switched/matrix.hpp"

namespace switched {

/// x(t+1) = A_{r(t)} x(t) with r(t) in {1..M}.
class SwitchedSystem {
public:
    explicit SwitchedSystem(std::vector<Mat> modes);

    int mode_count() const { return static_cast<int>(modes_.size()); }
    int dim() const { return modes_.front().rows(); }
    const Mat& mode(int s) const { return modes_[static_cast<std::size_t>(s) - 1]; }  // 1-based
    const std::vector<Mat>& modes() const { return modes_; }

private:
    std::vector<Mat> modes_;
};

/// Per-mode lower/upper bounds on the long-run fraction of time each mode is
/// active. Feasibility requires sum(lower) <= 1 <= sum(upper).
class ActivationBounds {
public:
    ActivationBounds(std::vector<double> lower, std::vector<double> upper);

    int mode_count() const { return static_cast<int>(lower_.size()); }
    double lower(int s) const { return lower_[static_cast<std::size_t>(s) - 1]; }  // 1-based
    double upper(int s) const { return upper_[static_cast<std::size_t>(s) - 1]; }
    const std::vector<double>& lower_vec() const { return lower_; }
    const std::vector<double>& upper_vec() const { return upper_; }

private:
    std::vector<double> lower_, upper_;
};

}  // namespace switched
