#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "readsim/ppo.hpp"

namespace readsim {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  PolicyParameters params;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::size_t updates = 0;
  double time_budget_s = 0.0;
};

// JSON weight dump. Doubles are written with round-trip precision, so a
// loaded checkpoint reproduces the saved networks bit for bit.
std::string checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
// Throws DataError for unreadable, malformed or wrong-version files.
Checkpoint load_checkpoint(const std::filesystem::path& path);

// update,mean_return,clip_fraction,approx_kl,entropy
std::string curve_csv(std::span<const CurvePoint> curve);

}  // namespace readsim
