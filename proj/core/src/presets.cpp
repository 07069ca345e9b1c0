#include "hsumma/presets.hpp"

#include <stdexcept>

namespace hsumma {

const std::vector<PlatformPreset>& all_presets() {
  // alpha/beta are per-message startup and per-element transfer times.
  // gamma: the exascale profile charges 2e-18 s per multiply-add pair
  // (equivalently, 1e-18 s per floating point operation); the two cluster
  // profiles model communication only.
  static const std::vector<PlatformPreset> presets = {
      {"grid5000", {1.0e-4, 1.0e-9, 0.0}, 8192, 128, 64, 64},
      {"bgp", {3.0e-6, 1.0e-9, 0.0}, 65536, 16384, 256, 256},
      {"exascale", {5.0e-7, 1.0e-11, 2.0e-18}, 4194304, 1048576, 256, 256},
  };
  return presets;
}

const PlatformPreset& find_preset(const std::string& name) {
  for (const PlatformPreset& p : all_presets())
    if (p.name == name) return p;
  throw std::invalid_argument("unknown preset: " + name);
}

}  // namespace hsumma
