#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ufls {

enum class Phase { A = 0, B = 1, C = 2 };

inline constexpr std::array<Phase, 3> kPhases{Phase::A, Phase::B, Phase::C};

// How a device is wired: one of the three phases, or across all three.
enum class Attachment { A, B, C, ThreePhase };

constexpr bool is_three_phase(Attachment at) { return at == Attachment::ThreePhase; }

constexpr Phase phase_of(Attachment at) {
  switch (at) {
    case Attachment::A: return Phase::A;
    case Attachment::B: return Phase::B;
    case Attachment::C: return Phase::C;
    case Attachment::ThreePhase: break;
  }
  throw std::logic_error("three-phase attachment has no single phase");
}

constexpr Attachment attachment_of(Phase p) {
  switch (p) {
    case Phase::A: return Attachment::A;
    case Phase::B: return Attachment::B;
    case Phase::C: return Attachment::C;
  }
  return Attachment::A;
}

constexpr char phase_letter(Phase p) { return "ABC"[static_cast<int>(p)]; }

std::string_view to_string(Attachment at);
std::optional<Attachment> parse_attachment(std::string_view text);

template <class T>
struct PhaseTriplet {
  T a{};
  T b{};
  T c{};

  constexpr T& operator[](Phase p) {
    switch (p) {
      case Phase::A: return a;
      case Phase::B: return b;
      case Phase::C: break;
    }
    return c;
  }
  constexpr const T& operator[](Phase p) const {
    switch (p) {
      case Phase::A: return a;
      case Phase::B: return b;
      case Phase::C: break;
    }
    return c;
  }

  friend constexpr bool operator==(const PhaseTriplet&, const PhaseTriplet&) = default;
};

using PowerTriplet = PhaseTriplet<double>;

inline double max_of(const PowerTriplet& s) {
  double m = s.a;
  if (s.b > m) m = s.b;
  if (s.c > m) m = s.c;
  return m;
}
inline double min_of(const PowerTriplet& s) {
  double m = s.a;
  if (s.b < m) m = s.b;
  if (s.c < m) m = s.c;
  return m;
}
inline double avg_of(const PowerTriplet& s) { return (s.a + s.b + s.c) / 3.0; }
inline double sum_of(const PowerTriplet& s) { return s.a + s.b + s.c; }

// First phase holding the maximum; ties resolve A < B < C.
inline Phase argmax_of(const PowerTriplet& s) {
  Phase best = Phase::A;
  for (Phase p : {Phase::B, Phase::C}) {
    if (s[p] > s[best]) best = p;
  }
  return best;
}

// Nominal system frequency.
inline constexpr double kNominalHz = 60.0;

}  // namespace ufls
