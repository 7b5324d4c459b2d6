#include "core/unbalance.hpp"

#include <cmath>
#include <numbers>

#include "core/errors.hpp"

namespace ufls {

namespace {

constexpr double kPi = std::numbers::pi;

// Rotation operator a = 1 at +120 degrees.
const Complex kA = std::polar(1.0, 2.0 * kPi / 3.0);
const Complex kA2 = kA * kA;

}  // namespace

double normalize_angle(double rad) {
  double r = std::remainder(rad, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

Phasor::Phasor(double magnitude, double angle_rad) {
  if (magnitude < 0.0) {
    magnitude = -magnitude;
    angle_rad += kPi;
  }
  magnitude_ = magnitude;
  angle_ = magnitude == 0.0 ? 0.0 : normalize_angle(angle_rad);
}

Phasor Phasor::from_complex(Complex z) { return Phasor(std::abs(z), std::arg(z)); }

Phasor Phasor::from_degrees(double magnitude, double angle_deg) {
  return Phasor(magnitude, angle_deg * kPi / 180.0);
}

SequenceComponents sequence_components(const Phasor& va, const Phasor& vb, const Phasor& vc) {
  const Complex a = va.to_complex();
  const Complex b = vb.to_complex();
  const Complex c = vc.to_complex();
  const Complex v0 = (a + b + c) / 3.0;
  const Complex v1 = (a + kA * b + kA2 * c) / 3.0;
  const Complex v2 = (a + kA2 * b + kA * c) / 3.0;
  return {Phasor::from_complex(v0), Phasor::from_complex(v1), Phasor::from_complex(v2)};
}

PhaseTriplet<Phasor> phase_quantities(const SequenceComponents& seq) {
  const Complex v0 = seq.zero.to_complex();
  const Complex v1 = seq.positive.to_complex();
  const Complex v2 = seq.negative.to_complex();
  return {Phasor::from_complex(v0 + v1 + v2), Phasor::from_complex(v0 + kA2 * v1 + kA * v2),
          Phasor::from_complex(v0 + kA * v1 + kA2 * v2)};
}

double vuf(const Phasor& va, const Phasor& vb, const Phasor& vc) {
  const auto seq = sequence_components(va, vb, vc);
  // Exact cancellation is rare in floating point; treat round-off as zero.
  const double scale = va.magnitude() + vb.magnitude() + vc.magnitude();
  if (seq.positive.magnitude() <= 1e-12 * scale || seq.positive.magnitude() == 0.0) {
    throw UndefinedMetricError("VUF undefined: positive-sequence component is zero");
  }
  const double ratio = seq.negative.magnitude() / seq.positive.magnitude();
  // Below round-off the set is balanced.
  return ratio <= 1e-12 ? 0.0 : 100.0 * ratio;
}

double puf(const PowerTriplet& s) {
  const double mean = avg_of(s);
  if (!(mean > 0.0)) throw UndefinedMetricError("PUF undefined: mean phase power is zero");
  double worst = 0.0;
  for (Phase p : kPhases) worst = std::max(worst, std::abs(s[p] - mean));
  return worst / mean;
}

PhaseTriplet<Phasor> nominal_voltages() {
  return {Phasor(1.0, 0.0), Phasor(1.0, -2.0 * kPi / 3.0), Phasor(1.0, 2.0 * kPi / 3.0)};
}

}  // namespace ufls
