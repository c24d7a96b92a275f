#pragma once

// Parameter checkpoints and evaluation reports.
//
// Checkpoint layout (little-endian, as written by the host):
//   "DHYPRCKP"  u32 version
//   u64 length, JSON text  (model shape plus a free-form config echo)
//   u32 tensor count, then per tensor: u32 name length, name, u64 rows,
//   u64 cols, rows*cols raw doubles
// Doubles are stored bit for bit, so a reload reproduces the parameters exactly.

#include <cstdint>
#include <filesystem>
#include <string>

#include "dhypr/model.hpp"
#include "dhypr/train.hpp"

namespace dhypr {

inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

struct Checkpoint {
  ModelParams params;
  // JSON object stored with the parameters (the resolved run config).
  std::string config_echo = "{}";
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string report_to_json(const EvalReport& report);

}  // namespace dhypr
