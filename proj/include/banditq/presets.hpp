#pragma once

#include <optional>
#include <string>
#include <vector>

#include "banditq/core.hpp"
#include "banditq/env.hpp"
#include "banditq/sweep.hpp"

namespace banditq {

struct Preset {
  std::string name;
  std::string description;
  InstanceConfig config;
  SourceSpec source;
};

const std::vector<Preset>& presets();
std::optional<Preset> find_preset(const std::string& name);

struct SweepPreset {
  std::string name;
  std::string description;
  SweepSpec spec;
};

const std::vector<SweepPreset>& sweep_presets();
std::optional<SweepPreset> find_sweep_preset(const std::string& name);

}  // namespace banditq
