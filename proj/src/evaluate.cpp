/*
 * Copyright 2026 The orbitpool Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <chrono>
#include <fstream>
#include <ostream>

#include "orbitpool/csv.hpp"
#include "orbitpool/harness.hpp"
#include "orbitpool/parallel.hpp"

namespace orbitpool {

std::vector<double> ratio_thresholds() {
  std::vector<double> t;
  for (int k = 0; k <= 7; ++k) t.push_back((60 + 5 * k) / 100.0);
  return t;
}

PrecisionRecall precision_recall(const MatchResult& m, double threshold) {
  PrecisionRecall pr;
  pr.threshold = threshold;
  for (const MatchRecord& r : m.records) {
    if (!r.query_covisible || r.ratio > threshold) continue;
    ++pr.accepted;
    if (r.correct) ++pr.correct;
  }
  pr.precision = pr.accepted ? static_cast<double>(pr.correct) / pr.accepted : 0.0;
  pr.recall = m.correspondences ? static_cast<double>(pr.correct) / m.correspondences : 0.0;
  return pr;
}

double average_precision(const std::vector<PrecisionRecall>& curve) {
  double ap = 0.0, prev_recall = 0.0;
  for (const PrecisionRecall& pr : curve) {
    if (pr.recall > prev_recall) {
      ap += (pr.recall - prev_recall) * pr.precision;
      prev_recall = pr.recall;
    }
  }
  return ap;
}

const KindSummary& EvalReport::summary_for(DescriptorKind k) const {
  for (const auto& s : summary)
    if (s.kind == k) return s;
  throw Error(ErrorCode::InvalidArgument, "kind not evaluated: " + to_string(k));
}

EvalReport evaluate(std::span<const SyntheticPair> pairs,
                    std::span<const DescriptorKind> kinds,
                    const MatchConfig& cfg, std::size_t threads) {
  if (pairs.empty() || kinds.empty())
    throw Error(ErrorCode::InvalidArgument, "evaluation needs pairs and kinds");
  const auto start = std::chrono::steady_clock::now();
  const FilterBank bank(cfg.bank);
  const auto thresholds = ratio_thresholds();

  // Pairs generated from one base share their reference image; describe
  // each distinct image once per kind.
  std::vector<const Image*> images;
  std::vector<std::size_t> ref_slot(pairs.size()), trans_slot(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    std::size_t slot = 0;
    while (slot < images.size() && !(*images[slot] == pairs[p].reference)) ++slot;
    if (slot == images.size()) images.push_back(&pairs[p].reference);
    ref_slot[p] = slot;
  }
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    trans_slot[p] = images.size();
    images.push_back(&pairs[p].transformed);
  }
  const std::size_t nk = kinds.size();
  std::vector<std::vector<Feature>> features(images.size() * nk);
  parallel_for(
      features.size(),
      [&](std::size_t task) {
        features[task] = extract_features(*images[task / nk], kinds[task % nk], cfg, bank);
      },
      threads);

  EvalReport report;
  report.records.resize(pairs.size() * nk);
  parallel_for(
      report.records.size(),
      [&](std::size_t task) {
        const std::size_t p = task / nk, k = task % nk;
        const SyntheticPair& pair = pairs[p];
        const MatchResult m = match_features(pair, features[ref_slot[p] * nk + k],
                                             features[trans_slot[p] * nk + k], cfg);
        PairRecord& rec = report.records[task];
        rec.pair = pair.id;
        rec.kind = kinds[k];
        rec.valid_queries = m.valid_queries;
        rec.correspondences = m.correspondences;
        rec.warning = m.warning || m.records.empty();
        for (double t : thresholds) rec.curve.push_back(precision_recall(m, t));
        rec.ap = average_precision(rec.curve);
      },
      threads);

  for (DescriptorKind kind : kinds) {
    KindSummary s;
    s.kind = kind;
    s.flagged = true;
    std::size_t n = 0, correspondences = 0;
    std::vector<std::size_t> accepted(thresholds.size()), correct(thresholds.size());
    for (const PairRecord& rec : report.records) {
      if (rec.kind != kind) continue;
      ++n;
      s.map += rec.ap;
      s.flagged = s.flagged && rec.warning;
      correspondences += rec.correspondences;
      for (std::size_t k = 0; k < thresholds.size(); ++k) {
        accepted[k] += rec.curve[k].accepted;
        correct[k] += rec.curve[k].correct;
      }
    }
    s.map = n ? s.map / n : 0.0;
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
      PrecisionRecall pr;
      pr.threshold = thresholds[k];
      pr.accepted = accepted[k];
      pr.correct = correct[k];
      pr.precision = accepted[k] ? static_cast<double>(correct[k]) / accepted[k] : 0.0;
      pr.recall = correspondences ? static_cast<double>(correct[k]) / correspondences : 0.0;
      s.pooled.push_back(pr);
    }
    report.summary.push_back(std::move(s));
  }
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
  out << "pair,kind,threshold,precision,recall\n";
  for (const PairRecord& rec : report.records)
    for (const PrecisionRecall& pr : rec.curve)
      out << rec.pair << ',' << to_string(rec.kind) << ',' << csv::fixed(pr.threshold, 2)
          << ',' << csv::fixed(pr.precision, 6) << ',' << csv::fixed(pr.recall, 6) << '\n';
}

void write_report_csv(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write report " + path.string());
  write_report_csv(out, report);
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "short write to report " + path.string());
}

void write_summary_csv(std::ostream& out, const EvalReport& report, double ratio) {
  out << "kind,map,flagged,precision,recall\n";
  for (const KindSummary& s : report.summary) {
    const PrecisionRecall* at = &s.pooled.front();
    for (const auto& pr : s.pooled)
      if (std::abs(pr.threshold - ratio) < std::abs(at->threshold - ratio)) at = &pr;
    out << to_string(s.kind) << ',' << csv::fixed(s.map, 6) << ',' << (s.flagged ? 1 : 0)
        << ',' << csv::fixed(at->precision, 6) << ',' << csv::fixed(at->recall, 6) << '\n';
  }
}

}  // namespace orbitpool
