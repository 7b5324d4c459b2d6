#pragma once

#include <map>
#include <string>
#include <vector>

namespace ufls {

// One sampled load curve in kVA. Values hold from their timestamp until the
// next sample (zero-order hold); the last sample holds forever.
class LoadProfile {
 public:
  LoadProfile() = default;
  // Throws std::invalid_argument on non-increasing times, negative power,
  // mismatched lengths or an empty series.
  LoadProfile(std::vector<double> times, std::vector<double> kva);

  // Throws LookupError when t precedes the first sample.
  double value_at(double t) const;

  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return kva_; }
  bool empty() const { return times_.empty(); }

  friend bool operator==(const LoadProfile&, const LoadProfile&) = default;

 private:
  std::vector<double> times_;
  std::vector<double> kva_;
};

using LoadProfileSet = std::map<std::string, LoadProfile>;

}  // namespace ufls
