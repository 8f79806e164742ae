#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "skyris/nn/mlp.hpp"

namespace skyris::nn {

// Binary layout (little-endian):
//   char[8]  "SKYRISCK"
//   u32      version (1)
//   u32      network count
//   per network:
//     u32 name length, name bytes
//     u32 output activation (0 identity, 1 tanh)
//     u32 width count L, u32 widths[L]
//     u64 parameter count P, f64 params[P]
//   u32      vector count
//   per vector: u32 name length, name bytes, u64 length, f64 values
// A JSON sidecar "<file>.json" carries metadata.
struct Checkpoint {
  std::vector<std::pair<std::string, Mlp>> nets;
  std::vector<std::pair<std::string, std::vector<double>>> vectors;
  nlohmann::json meta = nlohmann::json::object();

  const Mlp& net(const std::string& name) const;
  const std::vector<double>& vec(const std::string& name) const;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace skyris::nn
