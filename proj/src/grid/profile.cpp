#include "grid/profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core/errors.hpp"

namespace ufls {

LoadProfile::LoadProfile(std::vector<double> times, std::vector<double> kva)
    : times_(std::move(times)), kva_(std::move(kva)) {
  if (times_.empty()) throw std::invalid_argument("load profile has no samples");
  if (times_.size() != kva_.size()) throw std::invalid_argument("load profile length mismatch");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i]) || !std::isfinite(kva_[i])) {
      throw std::invalid_argument("load profile sample " + std::to_string(i) + " is not finite");
    }
    if (kva_[i] < 0.0) {
      throw std::invalid_argument("load profile sample " + std::to_string(i) + " is negative");
    }
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      throw std::invalid_argument("load profile times not strictly increasing at sample " +
                                  std::to_string(i));
    }
  }
}

double LoadProfile::value_at(double t) const {
  if (times_.empty() || t < times_.front()) {
    throw LookupError("no load profile sample at t = " + std::to_string(t));
  }
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  return kva_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

}  // namespace ufls
