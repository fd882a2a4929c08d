// Sensor-to-text encoding: renders one Observation as the fixed-order text
// block consumed by semantic backends. Pure function of its input.
#pragma once

#include <cmath>
#include <cstdio>
#include <string>

#include "navfuse/types.hpp"

namespace navfuse {
namespace detail {

inline std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  // Normalize "-0.0" to "0.0" so equal readings encode identically.
  std::string s(buf);
  if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) {
    s.erase(0, 1);
  }
  return s;
}

// 8 compass sectors of 45 degrees centered on the cardinal/intercardinal
// points; each sector includes its lower edge. 0 -> north, 90 -> east.
inline const char* cardinal_name(double degrees) {
  static const char* kNames[] = {"north", "northeast", "east", "southeast",
                                 "south", "southwest", "west", "northwest"};
  double d = std::fmod(degrees + 22.5, 360.0);
  if (d < 0.0) d += 360.0;
  return kNames[static_cast<int>(d / 45.0) % 8];
}

// Octant label for a bearing relative to the heading. Positive bearings are
// to the left.
inline const char* bearing_octant(double bearing) {
  double deg = bearing * 180.0 / kPi;
  if (deg >= -22.5 && deg < 22.5) return "ahead";
  if (deg >= 22.5 && deg < 67.5) return "ahead-left";
  if (deg >= 67.5 && deg < 112.5) return "left";
  if (deg >= 112.5 && deg < 157.5) return "behind-left";
  if (deg >= -67.5 && deg < -22.5) return "ahead-right";
  if (deg >= -112.5 && deg < -67.5) return "right";
  if (deg >= -157.5 && deg < -112.5) return "behind-right";
  return "behind";
}

inline std::string bearing_phrase(double bearing) {
  double deg = bearing * 180.0 / kPi;
  long rounded = std::lround(std::abs(deg));
  if (rounded == 0) return "bearing 0° ahead";
  std::string side = deg > 0.0 ? "left" : "right";
  return "bearing " + std::to_string(rounded) + "° " + side;
}

}  // namespace detail

// Encodes an observation as a deterministic text block, in fixed order:
// numeric descriptors, depth summary, one line per feature, context tags,
// instruction. Equal observations produce byte-identical text.
inline std::string encode_observation_prompt(const Observation& obs) {
  std::string out;

  double deg = obs.heading * 180.0 / kPi;
  long display = std::lround(deg) % 360;
  if (display < 0) display += 360;
  out += "Speed=" + detail::format_fixed(obs.speed, 1) +
         " m/s, Heading=" + std::to_string(display) + "° (" +
         detail::cardinal_name(deg) + ")\n";

  if (!obs.depth_scan.empty()) {
    int n = static_cast<int>(obs.depth_scan.size());
    int nearest = 0;
    for (int i = 1; i < n; ++i) {
      if (obs.depth_scan[i] < obs.depth_scan[nearest]) nearest = i;
    }
    double d = obs.depth_scan[nearest];
    if (d >= obs.depth_max_range - 1e-9) {
      out += "No obstacle within " +
             detail::format_fixed(obs.depth_max_range, 1) + " m.\n";
    } else {
      out += "Nearest obstacle: " + detail::format_fixed(d, 1) + " m, " +
             detail::bearing_octant(depth_ray_bearing(nearest, n)) + ".\n";
    }
  }

  for (const auto& f : obs.features) {
    out += "Feature " + f.id + ": " + f.label + " at " +
           detail::format_fixed(f.range, 1) + " m, " +
           detail::bearing_phrase(f.bearing);
    if (!f.attributes.empty()) {
      out += " [";
      bool first = true;
      for (const auto& [k, v] : f.attributes) {
        if (!first) out += ", ";
        first = false;
        out += k + "=" + v;
      }
      out += "]";
    }
    out += "\n";
  }

  if (!obs.context_tags.empty()) {
    out += "Context:";
    bool first = true;
    for (const auto& tag : obs.context_tags) {
      out += first ? " " : ", ";
      first = false;
      out += tag;
    }
    out += "\n";
  }

  if (obs.instruction && !obs.instruction->empty()) {
    out += "Instruction: " + *obs.instruction + "\n";
  }

  return out;
}

}  // namespace navfuse
