#pragma once

#include <string>

#include "wavden/nn/models.hpp"

namespace wavden {

// On-disk model state: every named tensor (parameters and optimizer moments)
// plus a JSON config echo. Format: magic "WCKP", u32 tensor count, then per
// tensor u16 name length, name bytes, u8 rank, u32 dims, little-endian f32
// payload; finally u32 text length and the config echo. Bit-exact round trip.
struct Checkpoint {
  nn::ParamSet<float> tensors;
  std::string config_text;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace wavden
