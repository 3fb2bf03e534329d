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

#include "dimnet/metrics.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "dimnet/error.h"

namespace dimnet {

EditResult EditErrorRate(const std::vector<int>& ref, const std::vector<int>& hyp) {
  const int n = static_cast<int>(ref.size());
  const int m = static_cast<int>(hyp.size());
  std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1, 0));
  for (int i = 0; i <= n; ++i) d[i][0] = i;
  for (int j = 0; j <= m; ++j) d[0][j] = j;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= m; ++j)
      d[i][j] = std::min({d[i - 1][j - 1] + (ref[i - 1] != hyp[j - 1]),
                          d[i - 1][j] + 1, d[i][j - 1] + 1});

  EditResult r;
  r.ref_len = n;
  int i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + (ref[i - 1] != hyp[j - 1])) {
      const bool same = ref[i - 1] == hyp[j - 1];
      r.alignment.push_back({same ? EditOp::kMatch : EditOp::kSub, i - 1, j - 1});
      if (!same) ++r.subs;
      --i;
      --j;
    } else if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      r.alignment.push_back({EditOp::kDel, i - 1, -1});
      ++r.dels;
      --i;
    } else {
      r.alignment.push_back({EditOp::kIns, -1, j - 1});
      ++r.ins;
      --j;
    }
  }
  std::reverse(r.alignment.begin(), r.alignment.end());
  if (n > 0) {
    r.rate = static_cast<double>(r.errors()) / n;
  } else if (m > 0) {
    r.rate = static_cast<double>(m);
    r.degenerate = true;
  }
  return r;
}

AccentAccuracyResult AccentAccuracy(const std::vector<int>& preds,
                                    const std::vector<int>& labels, int n_accents) {
  if (preds.size() != labels.size())
    Fail(ErrorCode::kInvalidArgument, "accent_accuracy: " + std::to_string(preds.size()) +
                                          " predictions vs " + std::to_string(labels.size()) +
                                          " labels");
  int k = n_accents;
  for (int l : labels) k = std::max(k, l + 1);
  AccentAccuracyResult r;
  r.per_accent.resize(std::max(k, 0));
  for (int a = 0; a < k; ++a) r.per_accent[a].accent = a;
  for (size_t i = 0; i < preds.size(); ++i) {
    if (labels[i] < 0) continue;
    AccentRecall& s = r.per_accent[labels[i]];
    ++s.count;
    ++r.total;
    if (preds[i] == labels[i]) {
      ++s.correct;
      ++r.correct;
    }
  }
  for (AccentRecall& s : r.per_accent)
    s.recall = s.count > 0 ? static_cast<double>(s.correct) / s.count : 0.0;
  r.accuracy = r.total > 0 ? static_cast<double>(r.correct) / r.total : 0.0;
  return r;
}

std::vector<TokenStat> AttributeErrors(const std::vector<int>& ref,
                                       const std::vector<int>& hyp) {
  std::vector<TokenStat> per_pos(ref.size());
  for (size_t i = 0; i < ref.size(); ++i) {
    per_pos[i].token = ref[i];
    per_pos[i].count = 1;
  }
  if (ref.empty()) return per_pos;
  EditResult e = EditErrorRate(ref, hyp);
  // Walk backwards so each insertion sees the next reference slot.
  int next_ref = static_cast<int>(ref.size()) - 1;
  for (auto it = e.alignment.rbegin(); it != e.alignment.rend(); ++it) {
    switch (it->op) {
      case EditOp::kMatch:
        next_ref = it->ref;
        break;
      case EditOp::kSub:
      case EditOp::kDel:
        ++per_pos[it->ref].errors;
        next_ref = it->ref;
        break;
      case EditOp::kIns:
        ++per_pos[next_ref].errors;
        break;
    }
  }
  return per_pos;
}

std::vector<AccentPhonemeReport> PerPhonemeReport(const PhonemeReportInput& in,
                                                  int top_k, const Lexicon* lexicon) {
  const size_t n = in.refs_f.size();
  if (in.hyps_f.size() != n || in.accents.size() != n)
    Fail(ErrorCode::kInvalidArgument, "per_phoneme_report: input lengths differ");
  const bool words = !in.refs_c.empty();
  if (words && (in.refs_c.size() != n || in.hyps_c.size() != n))
    Fail(ErrorCode::kInvalidArgument, "per_phoneme_report: coarse input lengths differ");

  struct Group {
    int n_utts = 0;
    std::map<int, TokenStat> tok;
    std::map<int, TokenStat> word;  // per coarse reference token
  };
  std::map<int, Group> groups;
  for (size_t u = 0; u < n; ++u) {
    Group& g = groups[in.accents[u]];
    ++g.n_utts;
    for (const TokenStat& s : AttributeErrors(in.refs_f[u], in.hyps_f[u])) {
      TokenStat& t = g.tok[s.token];
      t.token = s.token;
      t.count += s.count;
      t.errors += s.errors;
    }
    if (words) {
      for (const TokenStat& s : AttributeErrors(in.refs_c[u], in.hyps_c[u])) {
        TokenStat& t = g.word[s.token];
        t.token = s.token;
        t.count += s.count;
        t.errors += s.errors;
      }
    }
  }

  std::vector<AccentPhonemeReport> out;
  for (auto& [accent, g] : groups) {
    AccentPhonemeReport r;
    r.accent = accent;
    r.n_utts = g.n_utts;
    for (auto& [id, t] : g.tok) {
      t.per = t.count > 0 ? static_cast<double>(t.errors) / t.count : 0.0;
      r.tokens.push_back(t);
    }
    std::vector<TokenStat> ranked;
    for (const TokenStat& t : r.tokens)
      if (t.per > 0) ranked.push_back(t);
    std::sort(ranked.begin(), ranked.end(), [](const TokenStat& a, const TokenStat& b) {
      if (a.per != b.per) return a.per > b.per;
      return a.token < b.token;
    });
    if (static_cast<int>(ranked.size()) > top_k) ranked.resize(std::max(top_k, 0));
    r.top = ranked;

    if (words) {
      std::set<int> top_ids;
      for (const TokenStat& t : r.top) top_ids.insert(t.token);
      long all_err = 0, all_cnt = 0, top_err = 0, top_cnt = 0;
      for (const auto& [w, t] : g.word) {
        all_err += t.errors;
        all_cnt += t.count;
        bool hit = false;
        if (lexicon != nullptr) {
          try {
            for (int f : ExpandToFine(*lexicon, std::vector<int>{w}))
              if (top_ids.count(f)) hit = true;
          } catch (const Error&) {
            // specials and unmapped ids carry no phonemes
          }
        }
        if (hit) {
          top_err += t.errors;
          top_cnt += t.count;
        }
      }
      r.word_wer = all_cnt > 0 ? static_cast<double>(all_err) / all_cnt : 0.0;
      r.top_word_wer = top_cnt > 0 ? static_cast<double>(top_err) / top_cnt : 0.0;
    }
    out.push_back(std::move(r));
  }
  return out;
}

void WriteAccentCsv(const std::string& path, const AccentAccuracyResult& r) {
  std::ofstream os(path);
  if (!os) Fail(ErrorCode::kIo, "cannot write " + path);
  os << "accent,count,correct,recall\n";
  for (const AccentRecall& a : r.per_accent)
    os << a.accent << ',' << a.count << ',' << a.correct << ',' << a.recall << '\n';
  os << "all," << r.total << ',' << r.correct << ',' << r.accuracy << '\n';
}

void WritePhonemeCsv(const std::string& path,
                     const std::vector<AccentPhonemeReport>& reports,
                     const UnitInventory* inv) {
  std::ofstream os(path);
  if (!os) Fail(ErrorCode::kIo, "cannot write " + path);
  os << "accent,token,token_name,count,errors,per,rank\n";
  for (const AccentPhonemeReport& r : reports) {
    for (const TokenStat& t : r.tokens) {
      int rank = 0;
      for (size_t k = 0; k < r.top.size(); ++k)
        if (r.top[k].token == t.token) rank = static_cast<int>(k) + 1;
      std::string name = std::to_string(t.token);
      if (inv != nullptr && t.token >= 0 && t.token < inv->size(Side::kFine))
        name = inv->tokens(Side::kFine)[t.token];
      os << r.accent << ',' << t.token << ',' << name << ',' << t.count << ','
         << t.errors << ',' << t.per << ',' << rank << '\n';
    }
  }
}

}  // namespace dimnet
