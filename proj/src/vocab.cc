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

#include "dimnet/vocab.h"

#include <fstream>
#include <sstream>

#include "dimnet/error.h"

namespace dimnet {

namespace {

std::vector<std::string> ReadLines(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path);
  return out;
}

}  // namespace

UnitInventory::UnitInventory(std::vector<std::string> fine,
                             std::vector<std::string> coarse)
    : fine_(std::move(fine)), coarse_(std::move(coarse)) {
  if (fine_.empty() || fine_[0] != kBlankToken)
    Fail(ErrorCode::kConfig, "fine inventory must start with <blank>");
  for (int i = 0; i < static_cast<int>(fine_.size()); ++i) {
    if (!fine_index_.emplace(fine_[i], i).second)
      Fail(ErrorCode::kConfig, "duplicate fine token " + fine_[i]);
  }
  for (int i = 0; i < static_cast<int>(coarse_.size()); ++i) {
    if (!coarse_index_.emplace(coarse_[i], i).second)
      Fail(ErrorCode::kConfig, "duplicate coarse token " + coarse_[i]);
  }
  auto need = [&](const char* tok) {
    auto it = coarse_index_.find(tok);
    if (it == coarse_index_.end())
      Fail(ErrorCode::kConfig, std::string("coarse inventory lacks ") + tok);
    return it->second;
  };
  bos_id_ = need(kBosToken);
  eos_id_ = need(kEosToken);
  unk_id_ = need(kUnkToken);
  if (auto it = fine_index_.find(kSilenceToken); it != fine_index_.end())
    silence_id_ = it->second;
  if (fine_.size() >= coarse_.size())
    Fail(ErrorCode::kConfig,
         "fine inventory must be smaller than the coarse inventory");
}

UnitInventory::UnitInventory(const UnitInventory& other)
    : fine_(other.fine_),
      coarse_(other.coarse_),
      fine_index_(other.fine_index_),
      coarse_index_(other.coarse_index_),
      silence_id_(other.silence_id_),
      bos_id_(other.bos_id_),
      eos_id_(other.eos_id_),
      unk_id_(other.unk_id_),
      unk_warnings_(other.unk_warnings_.load()) {}

UnitInventory& UnitInventory::operator=(const UnitInventory& other) {
  if (this == &other) return *this;
  fine_ = other.fine_;
  coarse_ = other.coarse_;
  fine_index_ = other.fine_index_;
  coarse_index_ = other.coarse_index_;
  silence_id_ = other.silence_id_;
  bos_id_ = other.bos_id_;
  eos_id_ = other.eos_id_;
  unk_id_ = other.unk_id_;
  unk_warnings_.store(other.unk_warnings_.load());
  return *this;
}

std::optional<int> UnitInventory::Find(Side side, const std::string& label) const {
  const auto& index = side == Side::kFine ? fine_index_ : coarse_index_;
  auto it = index.find(label);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::vector<int> UnitInventory::Encode(Side side,
                                       const std::vector<std::string>& labels) const {
  std::vector<int> ids;
  ids.reserve(labels.size());
  for (const auto& l : labels) {
    if (auto id = Find(side, l)) {
      ids.push_back(*id);
    } else if (side == Side::kCoarse) {
      ids.push_back(unk_id_);
      ++unk_warnings_;
    } else {
      Fail(ErrorCode::kInvalidArgument, "unknown fine label " + l);
    }
  }
  return ids;
}

std::vector<std::string> UnitInventory::Decode(Side side,
                                               const std::vector<int>& ids) const {
  const auto& toks = tokens(side);
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int id : ids) {
    if (id < 0 || id >= static_cast<int>(toks.size()))
      Fail(ErrorCode::kIndexOutOfRange,
           "index " + std::to_string(id) + " outside inventory of size " +
               std::to_string(toks.size()));
    out.push_back(toks[id]);
  }
  return out;
}

void UnitInventory::Write(const std::string& fine_path,
                          const std::string& coarse_path) const {
  auto f = OpenOut(fine_path);
  for (const auto& t : fine_) f << t << '\n';
  auto c = OpenOut(coarse_path);
  for (const auto& t : coarse_) c << t << '\n';
}

UnitInventory UnitInventory::Read(const std::string& fine_path,
                                  const std::string& coarse_path) {
  auto strip = [](std::vector<std::string> v) {
    while (!v.empty() && v.back().empty()) v.pop_back();
    return v;
  };
  return UnitInventory(strip(ReadLines(fine_path)), strip(ReadLines(coarse_path)));
}

Lexicon::Lexicon(const UnitInventory& inv)
    : inv_(inv), entries_(inv.size(Side::kCoarse)) {}

void Lexicon::Set(int coarse_id, std::vector<int> fine_ids) {
  if (coarse_id < 0 || coarse_id >= static_cast<int>(entries_.size()))
    Fail(ErrorCode::kIndexOutOfRange, "coarse id " + std::to_string(coarse_id));
  if (inv_.IsCoarseSpecial(coarse_id))
    Fail(ErrorCode::kConfig, "specials have no lexicon entry");
  if (fine_ids.empty()) Fail(ErrorCode::kConfig, "empty lexicon entry");
  for (int f : fine_ids) {
    if (f <= inv_.blank_id() || f >= inv_.size(Side::kFine))
      Fail(ErrorCode::kConfig, "lexicon entry uses blank or out-of-range fine id");
  }
  entries_[coarse_id] = std::move(fine_ids);
}

const std::vector<int>* Lexicon::Entry(int coarse_id) const {
  if (coarse_id < 0 || coarse_id >= static_cast<int>(entries_.size())) return nullptr;
  return entries_[coarse_id].empty() ? nullptr : &entries_[coarse_id];
}

bool Lexicon::IsTotal() const {
  for (int i = 0; i < static_cast<int>(entries_.size()); ++i) {
    if (!inv_.IsCoarseSpecial(i) && entries_[i].empty()) return false;
  }
  return true;
}

void Lexicon::Write(const std::string& path) const {
  auto out = OpenOut(path);
  const auto& coarse = inv_.tokens(Side::kCoarse);
  const auto& fine = inv_.tokens(Side::kFine);
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].empty()) continue;
    out << coarse[i] << '\t';
    for (size_t j = 0; j < entries_[i].size(); ++j) {
      if (j) out << ' ';
      out << fine[entries_[i][j]];
    }
    out << '\n';
  }
}

Lexicon Lexicon::Read(const std::string& path, const UnitInventory& inv) {
  Lexicon lex(inv);
  const auto lines = ReadLines(path);
  for (size_t n = 0; n < lines.size(); ++n) {
    const std::string& line = lines[n];
    if (line.empty()) continue;
    const int lineno = static_cast<int>(n + 1);
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(lineno, "missing tab");
    auto cid = inv.Find(Side::kCoarse, line.substr(0, tab));
    if (!cid) throw ParseError(lineno, "unknown coarse token " + line.substr(0, tab));
    std::istringstream ss(line.substr(tab + 1));
    std::vector<int> fine;
    std::string tok;
    while (ss >> tok) {
      auto fid = inv.Find(Side::kFine, tok);
      if (!fid) throw ParseError(lineno, "unknown fine token " + tok);
      fine.push_back(*fid);
    }
    if (fine.empty()) throw ParseError(lineno, "empty pronunciation");
    lex.Set(*cid, std::move(fine));
  }
  return lex;
}

std::vector<int> ExpandToFine(const Lexicon& lex, const std::vector<int>& coarse) {
  const UnitInventory& inv = lex.inventory();
  std::vector<int> fine;
  for (int c : coarse) {
    if (inv.IsCoarseSpecial(c)) continue;
    const auto* e = lex.Entry(c);
    if (!e) {
      const bool in_range = c >= 0 && c < inv.size(Side::kCoarse);
      throw LexiconMiss(in_range ? inv.tokens(Side::kCoarse)[c]
                                 : "#" + std::to_string(c));
    }
    fine.insert(fine.end(), e->begin(), e->end());
  }
  return fine;
}

std::vector<std::string> ExpandToFine(const Lexicon& lex,
                                      const std::vector<std::string>& coarse) {
  const UnitInventory& inv = lex.inventory();
  std::vector<int> ids;
  ids.reserve(coarse.size());
  for (const auto& c : coarse) {
    auto id = inv.Find(Side::kCoarse, c);
    if (!id) throw LexiconMiss(c);
    ids.push_back(*id);
  }
  return inv.Decode(Side::kFine, ExpandToFine(lex, ids));
}

}  // namespace dimnet
