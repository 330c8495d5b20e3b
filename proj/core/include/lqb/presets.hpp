#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lqb/emit.hpp"
#include "lqb/params.hpp"
#include "lqb/sweep.hpp"

namespace lqb {

struct PresetOptions {
  std::filesystem::path out_dir = ".";
  int grid = 101;  ///< points per grid axis
  int threads = 1;
  Format format = Format::kCsv;
  SystemParams base = reference_defaults();  ///< rates and energies; swept values are set per preset
  double epsilon = 1e-8;                 ///< for presets with a single threshold
  bool record_timing = false;
};

[[nodiscard]] const std::vector<std::string>& preset_names();

/// Sweep spec behind the fig6 maps (n_th in [0.1, 20] x Omega/2pi in [1, 40] MHz).
[[nodiscard]] SweepSpec fig6_spec(const PresetOptions& opts);

/// Writes the preset's data files plus <name>.meta.json into opts.out_dir and
/// returns their paths. Throws InvalidArgument for unknown names.
std::vector<std::filesystem::path> run_preset(std::string_view name, const PresetOptions& opts);

}  // namespace lqb
