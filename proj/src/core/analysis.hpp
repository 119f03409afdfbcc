// Copyright 2026 The Sonify Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mapping.hpp"
#include "session_log.hpp"

namespace sonify {

// Expected |U1 - U2| for independent uniforms on [low, high]. Throws
// Error(kInvalidArgument) when high < low.
double ChanceLevel(double low, double high);

// Monte Carlo estimate of ChanceLevel. Requires n >= 100000.
double MonteCarloChance(double low, double high, std::size_t n, std::uint64_t seed);

enum class ErrorAxis { kDepth, kAzimuth };
std::string_view AxisName(ErrorAxis axis);

struct ErrorSample {
  std::string participant_id;
  SonificationKind sonification = SonificationKind::kFreq;
  int stage = 1;
  int phase = 0;  // learning block 1-3 in stage 1, else 0
  ErrorAxis axis = ErrorAxis::kDepth;
  double error = 0.0;        // cm or degrees
  double target = 0.0;       // cm or degrees
  double placed = 0.0;       // cm or degrees
};

struct FailureFlag {
  std::string participant_id;
  SonificationKind sonification = SonificationKind::kFreq;
  int stage = 1;
  ErrorAxis axis = ErrorAxis::kDepth;
  std::size_t n = 0;
  double mean_error = 0.0;
  bool failed = false;  // mean strictly above chance
};

// Groups by (participant, sonification, stage, axis).
std::vector<FailureFlag> ScreenFailures(std::span<const ErrorSample> samples,
                                        double chance);

struct BoxplotStats {
  std::size_t n = 0;
  double q1 = 0.0, median = 0.0, q3 = 0.0, mean = 0.0;
  double whisker_low = 0.0, whisker_high = 0.0;
  std::vector<double> outliers;
};

// Quantile of sorted data by linear interpolation between order
// statistics (position p * (n - 1)).
double Quantile(std::span<const double> sorted, double p);

// Tukey boxplot: whiskers reach the most extreme points within 1.5 IQR of
// the quartiles. Throws Error(kInsufficient) on empty input.
BoxplotStats ComputeBoxplot(std::span<const double> samples);

struct RegressionFit {
  std::size_t n = 0;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double p_value = 1.0;  // slope != 0, two-sided
  double residual_se = 0.0;
  double x_mean = 0.0;
  double sxx = 0.0;

  double Predict(double x) const { return intercept + slope * x; }
  // Deviation of the fit from the identity line.
  double Bias(double x) const { return Predict(x) - x; }
  // 95% confidence band of the mean response.
  std::pair<double, double> ConfidenceBand(double x, double level = 0.95) const;
};

// OLS of estimates on targets. Throws Error(kInsufficient) for n < 3 and
// Error(kDegenerate) for constant targets.
RegressionFit FitRegression(std::span<const double> targets,
                            std::span<const double> estimates);

// Rows are participants, columns conditions.
using Matrix = std::vector<std::vector<double>>;

struct AnovaResult {
  std::size_t n = 0;  // participants
  std::size_t k = 0;  // conditions
  double f = 0.0;
  double df1 = 0.0, df2 = 0.0;        // uncorrected
  double epsilon = 1.0;               // Greenhouse-Geisser
  double df1_gg = 0.0, df2_gg = 0.0;  // corrected
  double p_uncorrected = 1.0;
  double p_value = 1.0;               // corrected
};

// One-factor repeated-measures ANOVA. Throws Error(kInsufficient) for
// fewer than 3 rows or 2 columns and Error(kInvalidArgument) for ragged or
// non-finite cells (delete incomplete participants upstream).
AnovaResult RmAnova(const Matrix& m);

struct PairwiseResult {
  std::size_t a = 0, b = 0;  // column indices
  double t = 0.0;
  double df = 0.0;
  double p_raw = 1.0;
  double p_holm = 1.0;
  std::string stars;
};

// Holm step-down adjustment; output in input order.
std::vector<double> HolmAdjust(std::span<const double> p);
std::string Stars(double p);

// Paired t-tests over all column pairs (a < b), Holm-adjusted.
std::vector<PairwiseResult> PairwiseHolm(const Matrix& m);

// Positioning errors of non-aborted trials.
std::vector<ErrorSample> ExtractSamples(const SessionLog& log);

struct BoxplotRow {
  int stage = 1;
  SonificationKind sonification = SonificationKind::kFreq;
  int phase = 0;
  ErrorAxis axis = ErrorAxis::kDepth;
  BoxplotStats stats;
};

struct RegressionRow {
  int stage = 1;
  SonificationKind sonification = SonificationKind::kFreq;
  ErrorAxis axis = ErrorAxis::kDepth;
  RegressionFit fit;
};

struct AnovaRow {
  int stage = 1;
  ErrorAxis axis = ErrorAxis::kDepth;
  std::vector<SonificationKind> conditions;
  AnovaResult result;
};

struct PairwiseRow {
  int stage = 1;
  ErrorAxis axis = ErrorAxis::kDepth;
  SonificationKind a = SonificationKind::kFreq;
  SonificationKind b = SonificationKind::kFreq;
  std::size_t n = 0;
  PairwiseResult result;
};

struct StatsReport {
  std::size_t logs = 0;
  std::size_t trials = 0;
  std::vector<BoxplotRow> boxplots;
  std::vector<FailureFlag> failures;
  std::vector<RegressionRow> regressions;
  std::vector<AnovaRow> anova;
  std::vector<PairwiseRow> pairwise;
  std::vector<std::string> notes;  // skipped analyses and why
};

// stage 0 analyzes every stage present. Throws Error(kInsufficient) when
// there is nothing to analyze.
StatsReport BuildReport(std::span<const SessionLog> logs, int stage = 0);

// A directory yields its *.jsonl files in name order.
std::vector<SessionLog> LoadLogs(const std::filesystem::path& path);

std::string SummaryText(const StatsReport& report);

// Writes summary.txt, boxplots.csv, failures.csv, regressions.csv,
// anova.csv and pairwise.csv.
void WriteReport(const StatsReport& report, const std::filesystem::path& dir);

}  // namespace sonify
