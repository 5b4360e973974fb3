#include "switched/system.hpp"

#include <numeric>
#include <stdexcept>

namespace switched {

SwitchedSystem::SwitchedSystem(std::vector<Mat> modes) : modes_(std::move(modes)) {
    if (modes_.empty()) throw std::invalid_argument("a switched system needs at least one mode");
    const int n = modes_.front().rows();
    for (const Mat& a : modes_) {
        if (!a.is_square() || a.rows() != n) {
            throw std::invalid_argument("mode matrices must be square with a shared dimension");
        }
    }
}

ActivationBounds::ActivationBounds(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.empty() || lower_.size() != upper_.size()) {
        throw std::invalid_argument("bounds need matching nonempty lower/upper vectors");
    }
    for (std::size_t s = 0; s < lower_.size(); ++s) {
        if (!(lower_[s] >= 0.0) || !(lower_[s] <= upper_[s]) || !(upper_[s] <= 1.0)) {
            throw std::invalid_argument("bounds must satisfy 0 <= lower <= upper <= 1");
        }
    }
    const double lo_sum = std::accumulate(lower_.begin(), lower_.end(), 0.0);
    const double hi_sum = std::accumulate(upper_.begin(), upper_.end(), 0.0);
    if (lo_sum > 1.0 + 1e-12 || hi_sum < 1.0 - 1e-12) {
        throw std::invalid_argument("bounds must satisfy sum(lower) <= 1 <= sum(upper)");
    }
}

}  // namespace switched
