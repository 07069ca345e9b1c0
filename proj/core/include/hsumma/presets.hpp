#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hsumma/hockney.hpp"

namespace hsumma {

// Named machine profile: Hockney parameters plus the default problem shape
// experiments on that machine use.  gamma is seconds per multiply-add pair;
// profiles without a published compute rate carry gamma = 0 (communication
// only).
struct PlatformPreset {
  std::string name;
  HockneyParams params;
  std::int64_t n = 0;
  std::int64_t p = 1;
  std::int64_t b = 1;
  std::int64_t B = 1;
};

// Known presets: "grid5000", "bgp", "exascale".
const std::vector<PlatformPreset>& all_presets();

// Throws std::invalid_argument for an unknown name.
const PlatformPreset& find_preset(const std::string& name);

}  // namespace hsumma
