// wer_classifier.cc

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

#include "dsel/wer_classifier.h"

#include <cmath>
#include <fstream>
#include <sstream>

namespace dsel {

using nlohmann::ordered_json;

std::string_view WerLabelName(WerLabel label) {
  return label == WerLabel::kLowWer ? "low_wer" : "high_wer";
}

WerLabel LabelFromWer(double wer) {
  if (!(wer >= 0.0))
    throw Error("WER must be >= 0, got " + std::to_string(wer));
  return wer <= kWerClassBoundary ? WerLabel::kLowWer : WerLabel::kHighWer;
}

double LinearSvmModel::Score(std::span<const double> x) const {
  double s = bias;
  for (std::size_t j = 0; j < weights.size(); ++j)
    s += weights[j] * (x[j] - feature_means[j]) / feature_stds[j];
  return s;
}

namespace {

const FeatureVector &RequireFeatures(const Segment &s) {
  if (!s.features)
    throw Error("segment '" + s.id + "' has no feature vector");
  return *s.features;
}

double RequireWer(const Segment &s) {
  if (!s.reference)
    throw Error("segment '" + s.id + "' has no reference transcript");
  if (!s.wer_vs_reference)
    throw Error("segment '" + s.id + "' has no wer_vs_reference");
  return *s.wer_vs_reference;
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

LinearSvmModel TrainSvm(const SegmentPool &pool, const SvmTrainOptions &opts) {
  if (!(opts.lambda > 0)) throw Error("lambda must be > 0");
  if (opts.epochs <= 0) throw Error("epochs must be > 0");
  if (!(opts.low_wer_weight > 0) || !(opts.high_wer_weight > 0))
    throw Error("class weights must be > 0");
  if (pool.empty()) throw Error("cannot train on an empty pool");

  const FeatureVector &first = RequireFeatures(pool[0]);
  const std::size_t n = pool.size(), d = first.dim();
  std::vector<double> y(n);
  std::size_t n_low = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Segment &s = pool[i];
    const FeatureVector &f = RequireFeatures(s);
    if (f.acoustic_dim != first.acoustic_dim || f.text_dim != first.text_dim)
      throw Error("segment '" + s.id + "' has feature blocks " +
                  std::to_string(f.acoustic_dim) + "+" +
                  std::to_string(f.text_dim) + ", expected " +
                  std::to_string(first.acoustic_dim) + "+" +
                  std::to_string(first.text_dim));
    bool low = LabelFromWer(RequireWer(s)) == WerLabel::kLowWer;
    y[i] = low ? 1.0 : -1.0;
    n_low += low;
  }
  if (n_low == 0 || n_low == n)
    throw DegenerateLabelsError(
        std::string("training set contains only ") +
        (n_low == 0 ? "high-WER" : "low-WER") + " segments");

  LinearSvmModel m;
  m.acoustic_dim = first.acoustic_dim;
  m.text_dim = first.text_dim;
  m.options = opts;
  m.feature_means.assign(d, 0.0);
  m.feature_stds.assign(d, 0.0);
  for (const auto &s : pool)
    for (std::size_t j = 0; j < d; ++j) m.feature_means[j] += s.features->values[j];
  for (auto &v : m.feature_means) v /= static_cast<double>(n);
  for (const auto &s : pool)
    for (std::size_t j = 0; j < d; ++j) {
      double c = s.features->values[j] - m.feature_means[j];
      m.feature_stds[j] += c * c;
    }
  for (std::size_t j = 0; j < d; ++j) {
    double sd = std::sqrt(m.feature_stds[j] / static_cast<double>(n));
    m.feature_stds[j] =
        sd > 1e-12 * std::max(1.0, std::abs(m.feature_means[j])) ? sd : 1.0;
  }

  // Standardized design matrix with a trailing constant column for the bias.
  const std::size_t dw = d + 1;
  std::vector<double> x(n * dw);
  for (std::size_t i = 0; i < n; ++i) {
    const auto &v = pool[i].features->values;
    for (std::size_t j = 0; j < d; ++j)
      x[i * dw + j] = (v[j] - m.feature_means[j]) / m.feature_stds[j];
    x[i * dw + d] = 1.0;
  }

  // w = scale * v, so the per-step shrink is O(1).
  std::vector<double> v(dw, 0.0);
  double scale = 1.0, v_sqnorm = 0.0;
  const double radius = 1.0 / std::sqrt(opts.lambda);
  Rng rng(opts.seed, "svm-train");
  std::uint64_t t = 0;
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    for (std::size_t i : ShuffledIndices(n, rng)) {
      ++t;
      std::span<const double> xi(&x[i * dw], dw);
      const double eta = 1.0 / (opts.lambda * static_cast<double>(t));
      const double vx = Dot(v, xi);
      const double margin = y[i] * scale * vx;

      const double shrink = 1.0 - eta * opts.lambda;
      if (shrink <= 0.0) {
        std::fill(v.begin(), v.end(), 0.0);
        scale = 1.0;
        v_sqnorm = 0.0;
      } else {
        scale *= shrink;
      }

      if (margin < 1.0) {
        double cw = y[i] > 0 ? opts.low_wer_weight : opts.high_wer_weight;
        double a = eta * y[i] * cw / scale;
        double cur_vx = shrink <= 0.0 ? 0.0 : vx;
        v_sqnorm += 2.0 * a * cur_vx + a * a * Dot(xi, xi);
        for (std::size_t j = 0; j < dw; ++j) v[j] += a * xi[j];
      }

      double norm = scale * std::sqrt(std::max(0.0, v_sqnorm));
      if (norm > radius) scale *= radius / norm;

      if (scale < 1e-9) {
        for (auto &vj : v) vj *= scale;
        scale = 1.0;
        v_sqnorm = Dot(v, v);
      }
    }
  }

  m.weights.resize(d);
  for (std::size_t j = 0; j < d; ++j) m.weights[j] = scale * v[j];
  m.bias = scale * v[d];
  return m;
}

WerLabel Predict(const LinearSvmModel &model, const FeatureVector &features) {
  if (features.dim() != model.dim())
    throw DimensionMismatchError(model.dim(), features.dim());
  if (features.acoustic_dim != model.acoustic_dim)
    throw Error("feature blocks " + std::to_string(features.acoustic_dim) +
                "+" + std::to_string(features.text_dim) +
                " do not match model blocks " +
                std::to_string(model.acoustic_dim) + "+" +
                std::to_string(model.text_dim));
  return model.Score(features.values) >= 0.0 ? WerLabel::kLowWer
                                             : WerLabel::kHighWer;
}

void ConfusionMatrix::Add(WerLabel truth, WerLabel predicted) {
  bool tl = truth == WerLabel::kLowWer, pl = predicted == WerLabel::kLowWer;
  if (tl && pl) ++low_as_low;
  else if (tl) ++low_as_high;
  else if (pl) ++high_as_low;
  else ++high_as_high;
}

namespace {

double Ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

ClassMetrics Metrics(std::size_t tp, std::size_t fp, std::size_t fn) {
  ClassMetrics c;
  c.precision = Ratio(tp, tp + fp);
  c.recall = Ratio(tp, tp + fn);
  c.f1 = (c.precision + c.recall) > 0
             ? 2.0 * c.precision * c.recall / (c.precision + c.recall)
             : 0.0;
  c.support = tp + fn;
  return c;
}

}  // namespace

ClassificationReport ReportFromConfusion(const ConfusionMatrix &cm) {
  ClassificationReport r;
  r.confusion = cm;
  r.low_wer = Metrics(cm.low_as_low, cm.high_as_low, cm.low_as_high);
  r.high_wer = Metrics(cm.high_as_high, cm.low_as_high, cm.high_as_low);
  r.accuracy = Ratio(cm.low_as_low + cm.high_as_high, cm.total());
  return r;
}

ClassificationReport Evaluate(const LinearSvmModel &model,
                              const SegmentPool &pool) {
  if (pool.empty()) throw Error("cannot evaluate on an empty pool");
  ConfusionMatrix cm;
  for (const auto &s : pool) {
    WerLabel truth = LabelFromWer(RequireWer(s));
    cm.Add(truth, Predict(model, RequireFeatures(s)));
  }
  return ReportFromConfusion(cm);
}

SelectionResult SelectLowWer(const SegmentPool &pool,
                             const LinearSvmModel &model, Budget budget,
                             Rng &rng) {
  std::size_t n_high = 0;
  double high_s = 0.0;
  SegmentPool low = pool.Filter([&](const Segment &s) {
    bool keep = Predict(model, RequireFeatures(s)) == WerLabel::kLowWer;
    if (!keep) {
      ++n_high;
      high_s += s.duration_s;
    }
    return keep;
  });

  SelectionResult r = RandomSample(low, budget, rng);
  r.strategy = Strategy::kWerClf;
  if (low.empty()) r.warnings.push_back("no segments predicted low-WER");
  r.stats["predicted_low_wer_count"] = low.size();
  r.stats["predicted_low_wer_s"] = low.total_duration_s();
  r.stats["predicted_high_wer_count"] = n_high;
  r.stats["predicted_high_wer_s"] = high_s;
  return r;
}

ordered_json ToJson(const LinearSvmModel &m) {
  ordered_json j;
  j["format"] = "dsel-linear-svm";
  j["version"] = 1;
  j["acoustic_dim"] = m.acoustic_dim;
  j["text_dim"] = m.text_dim;
  j["lambda"] = m.options.lambda;
  j["epochs"] = m.options.epochs;
  j["seed"] = m.options.seed;
  j["low_wer_weight"] = m.options.low_wer_weight;
  j["high_wer_weight"] = m.options.high_wer_weight;
  j["bias"] = m.bias;
  j["weights"] = m.weights;
  j["feature_means"] = m.feature_means;
  j["feature_stds"] = m.feature_stds;
  return j;
}

LinearSvmModel ModelFromJson(const ordered_json &j) {
  LinearSvmModel m;
  try {
    if (j.at("format").get<std::string>() != "dsel-linear-svm")
      throw Error("not a dsel linear SVM model");
    m.acoustic_dim = j.at("acoustic_dim").get<std::size_t>();
    m.text_dim = j.at("text_dim").get<std::size_t>();
    m.options.lambda = j.at("lambda").get<double>();
    m.options.epochs = j.at("epochs").get<int>();
    m.options.seed = j.at("seed").get<std::uint64_t>();
    m.options.low_wer_weight = j.at("low_wer_weight").get<double>();
    m.options.high_wer_weight = j.at("high_wer_weight").get<double>();
    m.bias = j.at("bias").get<double>();
    m.weights = j.at("weights").get<std::vector<double>>();
    m.feature_means = j.at("feature_means").get<std::vector<double>>();
    m.feature_stds = j.at("feature_stds").get<std::vector<double>>();
  } catch (const nlohmann::json::exception &e) {
    throw Error(std::string("malformed model: ") + e.what());
  }
  const std::size_t d = m.acoustic_dim + m.text_dim;
  if (m.weights.size() != d || m.feature_means.size() != d ||
      m.feature_stds.size() != d)
    throw DimensionMismatchError(d, m.weights.size());
  for (double s : m.feature_stds)
    if (!(s > 0)) throw Error("model has a non-positive feature std");
  return m;
}

void SaveModel(const LinearSvmModel &model, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << ToJson(model).dump(2) << '\n';
  out.close();
  if (!out) throw Error("failed writing " + path.string());
}

LinearSvmModel LoadModel(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model " + path.string());
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const nlohmann::json::exception &e) {
    throw Error("malformed model " + path.string() + ": " + e.what());
  }
  return ModelFromJson(j);
}

namespace {

ordered_json MetricsJson(const ClassMetrics &c) {
  ordered_json j;
  j["precision"] = c.precision;
  j["recall"] = c.recall;
  j["f1"] = c.f1;
  j["support"] = c.support;
  return j;
}

ClassMetrics MetricsFromJson(const ordered_json &j) {
  ClassMetrics c;
  c.precision = j.at("precision").get<double>();
  c.recall = j.at("recall").get<double>();
  c.f1 = j.at("f1").get<double>();
  c.support = j.at("support").get<std::size_t>();
  return c;
}

}  // namespace

ordered_json ToJson(const ClassificationReport &r) {
  ordered_json j;
  j["low_wer"] = MetricsJson(r.low_wer);
  j["high_wer"] = MetricsJson(r.high_wer);
  j["accuracy"] = r.accuracy;
  j["confusion"] = {{"low_as_low", r.confusion.low_as_low},
                    {"low_as_high", r.confusion.low_as_high},
                    {"high_as_low", r.confusion.high_as_low},
                    {"high_as_high", r.confusion.high_as_high}};
  return j;
}

ClassificationReport ClassificationReportFromJson(const ordered_json &j) {
  ClassificationReport r;
  r.low_wer = MetricsFromJson(j.at("low_wer"));
  r.high_wer = MetricsFromJson(j.at("high_wer"));
  r.accuracy = j.at("accuracy").get<double>();
  const auto &c = j.at("confusion");
  r.confusion.low_as_low = c.at("low_as_low").get<std::size_t>();
  r.confusion.low_as_high = c.at("low_as_high").get<std::size_t>();
  r.confusion.high_as_low = c.at("high_as_low").get<std::size_t>();
  r.confusion.high_as_high = c.at("high_as_high").get<std::size_t>();
  return r;
}

}  // namespace dsel
