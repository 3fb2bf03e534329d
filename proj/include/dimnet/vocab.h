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

#ifndef DIMNET_VOCAB_H_
#define DIMNET_VOCAB_H_

#include <atomic>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace dimnet {

// Fine units carry pronunciation (phoneme-like), coarse units carry meaning
// (BPE-like). The two index spaces are never mixed without a Lexicon.
enum class Side { kFine, kCoarse };

inline constexpr const char* kBlankToken = "<blank>";
inline constexpr const char* kSilenceToken = "<sil>";
inline constexpr const char* kBosToken = "<sos>";
inline constexpr const char* kEosToken = "<eos>";
inline constexpr const char* kUnkToken = "<unk>";

class UnitInventory {
 public:
  UnitInventory() = default;
  // fine[0] must be <blank>; coarse must contain <sos>, <eos> and <unk>.
  UnitInventory(std::vector<std::string> fine, std::vector<std::string> coarse);
  UnitInventory(const UnitInventory& other);
  UnitInventory& operator=(const UnitInventory& other);

  const std::vector<std::string>& tokens(Side side) const {
    return side == Side::kFine ? fine_ : coarse_;
  }
  int size(Side side) const { return static_cast<int>(tokens(side).size()); }
  int blank_id() const { return 0; }
  // -1 when the fine inventory has no <sil>.
  int silence_id() const { return silence_id_; }
  int bos_id() const { return bos_id_; }
  int eos_id() const { return eos_id_; }
  int unk_id() const { return unk_id_; }
  bool IsCoarseSpecial(int id) const {
    return id == bos_id_ || id == eos_id_ || id == unk_id_;
  }
  std::optional<int> Find(Side side, const std::string& label) const;

  // Unknown coarse labels become <unk> and bump unk_warnings(); an unknown
  // fine label is an error since the fine side has no <unk>.
  std::vector<int> Encode(Side side, const std::vector<std::string>& labels) const;
  std::vector<std::string> Decode(Side side, const std::vector<int>& ids) const;
  int unk_warnings() const { return unk_warnings_.load(); }

  void Write(const std::string& fine_path, const std::string& coarse_path) const;
  static UnitInventory Read(const std::string& fine_path,
                            const std::string& coarse_path);

 private:
  std::vector<std::string> fine_;
  std::vector<std::string> coarse_;
  std::unordered_map<std::string, int> fine_index_;
  std::unordered_map<std::string, int> coarse_index_;
  int silence_id_ = -1;
  int bos_id_ = -1;
  int eos_id_ = -1;
  int unk_id_ = -1;
  mutable std::atomic<int> unk_warnings_{0};
};

// coarse id -> non-empty fine id sequence.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(const UnitInventory& inv);

  void Set(int coarse_id, std::vector<int> fine_ids);
  const std::vector<int>* Entry(int coarse_id) const;
  // Every non-special coarse token has an entry.
  bool IsTotal() const;
  const UnitInventory& inventory() const { return inv_; }

  void Write(const std::string& path) const;
  static Lexicon Read(const std::string& path, const UnitInventory& inv);

 private:
  UnitInventory inv_;
  std::vector<std::vector<int>> entries_;
};

// Concatenates per-token expansions; specials expand to nothing. Throws
// LexiconMiss for a non-special token without an entry.
std::vector<int> ExpandToFine(const Lexicon& lex, const std::vector<int>& coarse);
std::vector<std::string> ExpandToFine(const Lexicon& lex,
                                      const std::vector<std::string>& coarse);

}  // namespace dimnet

#endif  // DIMNET_VOCAB_H_
