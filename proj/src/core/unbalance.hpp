#pragma once

#include <complex>

#include "core/phase.hpp"

namespace ufls {

using Complex = std::complex<double>;

// Polar voltage or current value in per unit. Angle is kept in (-pi, pi].
class Phasor {
 public:
  Phasor() = default;
  Phasor(double magnitude, double angle_rad);

  static Phasor from_complex(Complex z);
  static Phasor from_degrees(double magnitude, double angle_deg);

  double magnitude() const { return magnitude_; }
  double angle() const { return angle_; }
  Complex to_complex() const { return std::polar(magnitude_, angle_); }

 private:
  double magnitude_ = 0.0;
  double angle_ = 0.0;
};

double normalize_angle(double rad);

struct SequenceComponents {
  Phasor zero;
  Phasor positive;
  Phasor negative;
};

// Fortescue transform with the a-phase as reference and abc rotation of -120 deg.
SequenceComponents sequence_components(const Phasor& va, const Phasor& vb, const Phasor& vc);
PhaseTriplet<Phasor> phase_quantities(const SequenceComponents& seq);

// Voltage unbalance factor in percent: 100 |V2| / |V1|.
// Throws UndefinedMetricError when |V1| is zero.
double vuf(const Phasor& va, const Phasor& vb, const Phasor& vc);
inline double vuf(const PhaseTriplet<Phasor>& v) { return vuf(v.a, v.b, v.c); }

// Power unbalance factor: max_x |S_x - mean(S)| / mean(S).
//
// The formula is not pinned down by any single standard; this is the
// max-deviation-from-mean ratio (0 when balanced, dimensionless). Swap this
// function out if a different definition is needed.
// Throws UndefinedMetricError when the mean is zero.
double puf(const PowerTriplet& s);

// Balanced 1 p.u. positive-sequence set at 0, -120, +120 degrees.
PhaseTriplet<Phasor> nominal_voltages();

}  // namespace ufls
