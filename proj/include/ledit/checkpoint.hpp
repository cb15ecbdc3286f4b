#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ledit/tensor.hpp"

namespace ledit {

struct NamedTensor {
    std::string name;
    Tensor tensor;
};

// Checkpoint directory layout:
//   header.json    schema version, schedule/config echo, embedder tag, step
//   manifest.json  name -> shape -> file for params and optimizer tensors
//   params/*.f32   raw little-endian float32 per named parameter tensor
//   opt/*.f32      optimizer state tensors
// Round trips are bit-exact.
struct Checkpoint {
    nlohmann::json header;
    std::vector<NamedTensor> params;
    std::vector<NamedTensor> opt;
};

void save_checkpoint(const std::string& dir, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& dir);

// FNV-1a over all checkpoint file bytes in sorted filename order.
uint64_t checkpoint_hash(const std::string& dir);

} // namespace ledit
