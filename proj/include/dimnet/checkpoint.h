// Copyright 2026 The DIMNet-Toy Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DIMNET_CHECKPOINT_H_
#define DIMNET_CHECKPOINT_H_

#include <memory>
#include <string>
#include <vector>

#include "dimnet/autograd.h"
#include "dimnet/config.h"
#include "dimnet/model.h"
#include "dimnet/vocab.h"

namespace dimnet {

inline constexpr int kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  ag::Mat value;
};

struct Checkpoint {
  int version = kCheckpointVersion;
  std::string config_text;  // full ConfigToText echo
  std::vector<std::string> fine_tokens;
  std::vector<std::string> coarse_tokens;
  std::vector<NamedTensor> tensors;
};

Checkpoint MakeCheckpoint(const DimNet& model);
// Writes to a temporary file first, then renames over `path`.
void SaveCheckpoint(const std::string& path, const Checkpoint& ckpt);
void SaveModel(const std::string& path, const DimNet& model);
Checkpoint LoadCheckpoint(const std::string& path);

// Rebuilds the model. With `expected`, every shape-determining key must
// agree with the stored config or a ConfigError names the first mismatch.
// Non-shape keys (decode, train) come from `expected` when given.
std::unique_ptr<DimNet> RestoreModel(const Checkpoint& ckpt,
                                     const Config* expected = nullptr);
void CopyTensors(const Checkpoint& ckpt, DimNet* model);

}  // namespace dimnet

#endif  // DIMNET_CHECKPOINT_H_
