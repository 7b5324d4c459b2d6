#include "core/phase.hpp"

namespace ufls {

std::string_view to_string(Attachment at) {
  switch (at) {
    case Attachment::A: return "A";
    case Attachment::B: return "B";
    case Attachment::C: return "C";
    case Attachment::ThreePhase: return "ABC";
  }
  return "?";
}

std::optional<Attachment> parse_attachment(std::string_view text) {
  if (text == "A" || text == "a") return Attachment::A;
  if (text == "B" || text == "b") return Attachment::B;
  if (text == "C" || text == "c") return Attachment::C;
  if (text == "ABC" || text == "abc" || text == "3ph") return Attachment::ThreePhase;
  return std::nullopt;
}

}  // namespace ufls
