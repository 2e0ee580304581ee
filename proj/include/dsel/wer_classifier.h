// dsel/wer_classifier.h

// Copyright 2026  The dsel Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef DSEL_WER_CLASSIFIER_H_
#define DSEL_WER_CLASSIFIER_H_

// Binary low/high-WER linear SVM over concatenated [acoustic; text] feature
// vectors, and selection of low-WER-predicted segments.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dsel/manifest.h"
#include "dsel/sampler.h"

namespace dsel {

enum class WerLabel { kLowWer, kHighWer };

inline constexpr double kWerClassBoundary = 0.5;

std::string_view WerLabelName(WerLabel label);
// LowWer iff wer <= 0.5.  Negative or NaN wer throws Error.
WerLabel LabelFromWer(double wer);

struct SvmTrainOptions {
  double lambda = 1e-4;
  int epochs = 20;
  std::uint64_t seed = Rng::kDefaultSeed;
  // Per-class hinge-loss weights; 1/1 means no reweighting.
  double low_wer_weight = 1.0;
  double high_wer_weight = 1.0;

  bool operator==(const SvmTrainOptions &) const = default;
};

struct LinearSvmModel {
  std::size_t acoustic_dim = 0;
  std::size_t text_dim = 0;
  std::vector<double> weights;  // in standardized feature space
  double bias = 0.0;
  std::vector<double> feature_means;
  std::vector<double> feature_stds;
  SvmTrainOptions options;

  std::size_t dim() const { return weights.size(); }
  // Decision value; >= 0 predicts LowWer.  Dimension is not checked.
  double Score(std::span<const double> x) const;

  bool operator==(const LinearSvmModel &) const = default;
};

// Pegasos: hinge-loss stochastic subgradient descent with step 1/(lambda t),
// projection onto the ball of radius 1/sqrt(lambda), one pass per epoch over
// a seeded shuffle.  The bias is learned as the weight of a constant feature.
// Features are standardized first; zero-variance dimensions get std 1.
LinearSvmModel TrainSvm(const SegmentPool &pool,
                        const SvmTrainOptions &opts = {});

WerLabel Predict(const LinearSvmModel &model, const FeatureVector &features);

struct ConfusionMatrix {
  // Rows are true labels, columns predictions.
  std::size_t low_as_low = 0;
  std::size_t low_as_high = 0;
  std::size_t high_as_low = 0;
  std::size_t high_as_high = 0;

  std::size_t total() const {
    return low_as_low + low_as_high + high_as_low + high_as_high;
  }
  void Add(WerLabel truth, WerLabel predicted);
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct ClassificationReport {
  ClassMetrics low_wer;
  ClassMetrics high_wer;
  double accuracy = 0.0;
  ConfusionMatrix confusion;
};

// Precision/recall/F1 per class, treating each class in turn as positive.
// An undefined ratio (0/0) is reported as 0.
ClassificationReport ReportFromConfusion(const ConfusionMatrix &cm);

// Throws on an empty pool or a segment lacking features/wer_vs_reference.
ClassificationReport Evaluate(const LinearSvmModel &model,
                              const SegmentPool &pool);

// Discards HighWer-predicted segments, then RandomSample with rng.  An empty
// filtered set gives an empty result carrying a warning.
SelectionResult SelectLowWer(const SegmentPool &pool,
                             const LinearSvmModel &model, Budget budget,
                             Rng &rng);

nlohmann::ordered_json ToJson(const LinearSvmModel &model);
LinearSvmModel ModelFromJson(const nlohmann::ordered_json &j);
void SaveModel(const LinearSvmModel &model, const std::filesystem::path &path);
LinearSvmModel LoadModel(const std::filesystem::path &path);

nlohmann::ordered_json ToJson(const ClassificationReport &r);
ClassificationReport ClassificationReportFromJson(
    const nlohmann::ordered_json &j);

}  // namespace dsel

#endif  // DSEL_WER_CLASSIFIER_H_
