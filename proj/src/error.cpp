#include "slesim/error.hpp"

namespace sle {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::domain: return "DOMAIN";
    case Errc::param: return "PARAM";
    case Errc::format: return "FORMAT";
    case Errc::resolution: return "RESOLUTION";
    case Errc::starved: return "STARVED";
    case Errc::horizon: return "HORIZON";
    case Errc::walker_budget: return "WALKER_BUDGET_EXCEEDED";
    case Errc::dead_point: return "DEAD_POINT";
    case Errc::target_swallowed: return "TARGET_SWALLOWED_EARLY";
    case Errc::degenerate: return "NUMERIC_DEGENERATE";
  }
  return "UNKNOWN";
}

}  // namespace sle
