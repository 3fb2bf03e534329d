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

#ifndef DIMNET_METRICS_H_
#define DIMNET_METRICS_H_

#include <string>
#include <vector>

#include "dimnet/vocab.h"

namespace dimnet {

enum class EditOp { kMatch, kSub, kDel, kIns };

struct AlignedPair {
  EditOp op;
  int ref = -1;  // index into ref, -1 for insertions
  int hyp = -1;  // index into hyp, -1 for deletions
};

struct EditResult {
  double rate = 0.0;
  int subs = 0;
  int dels = 0;
  int ins = 0;
  int ref_len = 0;
  bool degenerate = false;  // empty reference, non-empty hypothesis
  std::vector<AlignedPair> alignment;
  int errors() const { return subs + dels + ins; }
};

// Unit-cost Levenshtein; ties prefer substitution, then deletion, then
// insertion.
EditResult EditErrorRate(const std::vector<int>& ref, const std::vector<int>& hyp);

// Corpus-level rate: summed errors over summed reference length.
struct CorpusErrorRate {
  double rate = 0.0;
  long errors = 0;
  long ref_len = 0;
  void Add(const EditResult& r) {
    errors += r.errors();
    ref_len += r.ref_len;
    rate = ref_len > 0 ? static_cast<double>(errors) / ref_len : 0.0;
  }
};

struct AccentRecall {
  int accent = 0;
  int count = 0;
  int correct = 0;
  double recall = 0.0;
};

struct AccentAccuracyResult {
  double accuracy = 0.0;
  int total = 0;
  int correct = 0;
  std::vector<AccentRecall> per_accent;
};

// Labels < 0 are skipped. n_accents <= 0 sizes the table from the data.
AccentAccuracyResult AccentAccuracy(const std::vector<int>& preds,
                                    const std::vector<int>& labels,
                                    int n_accents = 0);

struct TokenStat {
  int token = 0;
  int count = 0;   // occurrences in the references
  int errors = 0;  // sub + del + attributed ins
  double per = 0.0;
};

struct AccentPhonemeReport {
  int accent = 0;  // -1 groups unlabeled utterances
  int n_utts = 0;
  std::vector<TokenStat> tokens;  // every reference token, by id
  std::vector<TokenStat> top;     // highest PER first, PER > 0 only
  double top_word_wer = 0.0;      // coarse tokens containing a top phoneme
  double word_wer = 0.0;          // all coarse tokens in this group
};

struct PhonemeReportInput {
  std::vector<std::vector<int>> refs_f, hyps_f;
  std::vector<std::vector<int>> refs_c, hyps_c;  // optional, for word WER
  std::vector<int> accents;
};

// Errors are charged to reference tokens through the edit alignment; an
// insertion is charged to the next reference token (the last one at the end).
std::vector<TokenStat> AttributeErrors(const std::vector<int>& ref,
                                       const std::vector<int>& hyp);

std::vector<AccentPhonemeReport> PerPhonemeReport(const PhonemeReportInput& in,
                                                  int top_k,
                                                  const Lexicon* lexicon);

void WriteAccentCsv(const std::string& path, const AccentAccuracyResult& r);
// Columns: accent,token,token_name,count,errors,per,rank (rank 0 = not top-k).
void WritePhonemeCsv(const std::string& path,
                     const std::vector<AccentPhonemeReport>& reports,
                     const UnitInventory* inv);

}  // namespace dimnet

#endif  // DIMNET_METRICS_H_
