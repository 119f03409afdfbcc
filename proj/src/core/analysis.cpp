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

#include "analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "distributions.hpp"
#include "error.hpp"
#include "protocol.hpp"

namespace sonify {

namespace {

double Mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string Num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

void CheckMatrix(const Matrix& m) {
  if (m.size() < 3) {
    throw Error(ErrorCode::kInsufficient, "need at least 3 participants, have " +
                                              std::to_string(m.size()));
  }
  const std::size_t k = m.front().size();
  if (k < 2) throw Error(ErrorCode::kInsufficient, "need at least 2 conditions");
  for (const auto& row : m) {
    if (row.size() != k) {
      throw Error(ErrorCode::kInvalidArgument,
                  "missing cells; remove incomplete participants before the test");
    }
    for (double v : row) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "non-finite cell; remove incomplete participants before the test");
      }
    }
  }
}

double GreenhouseGeisser(const Matrix& m) {
  const std::size_t n = m.size();
  const std::size_t k = m.front().size();
  std::vector<double> col_mean(k, 0.0);
  for (const auto& row : m) {
    for (std::size_t j = 0; j < k; ++j) col_mean[j] += row[j] / static_cast<double>(n);
  }
  std::vector<double> s(k * k, 0.0);
  for (const auto& row : m) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        s[i * k + j] += (row[i] - col_mean[i]) * (row[j] - col_mean[j]) /
                        static_cast<double>(n - 1);
      }
    }
  }
  std::vector<double> row_mean(k, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) row_mean[i] += s[i * k + j] / static_cast<double>(k);
    grand += row_mean[i] / static_cast<double>(k);
  }
  double trace = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      // The covariance is symmetric, so column means equal row means.
      const double c = s[i * k + j] - row_mean[i] - row_mean[j] + grand;
      if (i == j) trace += c;
      sum_sq += c * c;
    }
  }
  const double lower = 1.0 / static_cast<double>(k - 1);
  if (!(sum_sq > 0.0)) return 1.0;
  const double eps = trace * trace / (static_cast<double>(k - 1) * sum_sq);
  return std::clamp(eps, lower, 1.0);
}

template <typename T>
std::string Join(const std::vector<T>& v, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += sep;
    out += Num(v[i]);
  }
  return out;
}

}  // namespace

double ChanceLevel(double low, double high) {
  if (!std::isfinite(low) || !std::isfinite(high) || high < low) {
    throw Error(ErrorCode::kInvalidArgument, "chance level needs low <= high");
  }
  return (high - low) / 3.0;
}

double MonteCarloChance(double low, double high, std::size_t n, std::uint64_t seed) {
  ChanceLevel(low, high);
  if (n < 100000) {
    throw Error(ErrorCode::kInvalidArgument, "Monte Carlo chance needs at least 1e5 samples");
  }
  std::mt19937_64 rng(seed);
  const double width = high - low;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = low + width * Uniform01(rng);
    const double b = low + width * Uniform01(rng);
    sum += std::abs(a - b);
  }
  return sum / static_cast<double>(n);
}

std::string_view AxisName(ErrorAxis axis) {
  return axis == ErrorAxis::kDepth ? "depth" : "azimuth";
}

std::vector<FailureFlag> ScreenFailures(std::span<const ErrorSample> samples, double chance) {
  using Key = std::tuple<std::string, int, int, int>;
  std::map<Key, std::pair<double, std::size_t>> groups;
  for (const ErrorSample& s : samples) {
    auto& g = groups[{s.participant_id, static_cast<int>(s.sonification), s.stage,
                      static_cast<int>(s.axis)}];
    g.first += s.error;
    ++g.second;
  }
  std::vector<FailureFlag> out;
  for (const auto& [key, g] : groups) {
    FailureFlag f;
    f.participant_id = std::get<0>(key);
    f.sonification = static_cast<SonificationKind>(std::get<1>(key));
    f.stage = std::get<2>(key);
    f.axis = static_cast<ErrorAxis>(std::get<3>(key));
    f.n = g.second;
    f.mean_error = g.first / static_cast<double>(g.second);
    f.failed = f.mean_error > chance;
    out.push_back(f);
  }
  return out;
}

double Quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorCode::kInsufficient, "quantile of empty data");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BoxplotStats ComputeBoxplot(std::span<const double> samples) {
  if (samples.empty()) throw Error(ErrorCode::kInsufficient, "boxplot of empty data");
  std::vector<double> v(samples.begin(), samples.end());
  std::sort(v.begin(), v.end());
  BoxplotStats b;
  b.n = v.size();
  b.q1 = Quantile(v, 0.25);
  b.median = Quantile(v, 0.5);
  b.q3 = Quantile(v, 0.75);
  b.mean = Mean(v);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  b.whisker_low = b.q1;
  b.whisker_high = b.q3;
  bool have_inlier = false;
  for (double x : v) {
    if (x < lo_fence || x > hi_fence) {
      b.outliers.push_back(x);
      continue;
    }
    if (!have_inlier) {
      b.whisker_low = x;
      have_inlier = true;
    }
    b.whisker_high = x;
  }
  return b;
}

std::pair<double, double> RegressionFit::ConfidenceBand(double x, double level) const {
  const double df = static_cast<double>(n) - 2.0;
  const double t = StudentTQuantile(0.5 + level / 2.0, df);
  const double dx = x - x_mean;
  const double se = residual_se * std::sqrt(1.0 / static_cast<double>(n) + dx * dx / sxx);
  const double y = Predict(x);
  return {y - t * se, y + t * se};
}

RegressionFit FitRegression(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kInvalidArgument, "targets and estimates differ in length");
  }
  if (x.size() < 3) {
    throw Error(ErrorCode::kInsufficient,
                "regression needs at least 3 points, have " + std::to_string(x.size()));
  }
  RegressionFit fit;
  fit.n = x.size();
  fit.x_mean = Mean(x);
  const double y_mean = Mean(y);
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - fit.x_mean;
    const double dy = y[i] - y_mean;
    fit.sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(fit.sxx > 0.0)) throw Error(ErrorCode::kDegenerate, "targets are constant");
  fit.slope = sxy / fit.sxx;
  fit.intercept = y_mean - fit.slope * fit.x_mean;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.Predict(x[i]);
    sse += r * r;
  }
  const double df = static_cast<double>(fit.n) - 2.0;
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  fit.residual_se = std::sqrt(sse / df);
  if (fit.residual_se > 0.0) {
    const double t = fit.slope / (fit.residual_se / std::sqrt(fit.sxx));
    fit.p_value = StudentTTwoSided(t, df);
  } else {
    fit.p_value = fit.slope != 0.0 ? 0.0 : 1.0;
  }
  return fit;
}

AnovaResult RmAnova(const Matrix& m) {
  CheckMatrix(m);
  AnovaResult r;
  r.n = m.size();
  r.k = m.front().size();
  const double n = static_cast<double>(r.n);
  const double k = static_cast<double>(r.k);
  double grand = 0.0;
  std::vector<double> col(r.k, 0.0);
  std::vector<double> row(r.n, 0.0);
  for (std::size_t i = 0; i < r.n; ++i) {
    for (std::size_t j = 0; j < r.k; ++j) {
      grand += m[i][j];
      col[j] += m[i][j];
      row[i] += m[i][j];
    }
  }
  grand /= n * k;
  for (double& c : col) c /= n;
  for (double& v : row) v /= k;
  double ss_cond = 0.0;
  double ss_err = 0.0;
  for (std::size_t j = 0; j < r.k; ++j) ss_cond += n * (col[j] - grand) * (col[j] - grand);
  for (std::size_t i = 0; i < r.n; ++i) {
    for (std::size_t j = 0; j < r.k; ++j) {
      const double e = m[i][j] - row[i] - col[j] + grand;
      ss_err += e * e;
    }
  }
  r.df1 = k - 1.0;
  r.df2 = (k - 1.0) * (n - 1.0);
  r.epsilon = GreenhouseGeisser(m);
  r.df1_gg = r.epsilon * r.df1;
  r.df2_gg = r.epsilon * r.df2;
  // Relative to the data scale, a residual this small is rounding noise.
  double scale = 0.0;
  for (const auto& rw : m) {
    for (double v : rw) scale = std::max(scale, std::abs(v - grand));
  }
  const double noise = 1e-24 * scale * scale * n * k;
  if (ss_cond <= noise) {
    r.f = 0.0;
    r.p_uncorrected = r.p_value = 1.0;
    return r;
  }
  if (ss_err <= noise) {
    r.f = std::numeric_limits<double>::infinity();
    r.p_uncorrected = r.p_value = 0.0;
    return r;
  }
  r.f = (ss_cond / r.df1) / (ss_err / r.df2);
  r.p_uncorrected = FSurvival(r.f, r.df1, r.df2);
  r.p_value = FSurvival(r.f, r.df1_gg, r.df2_gg);
  return r;
}

std::vector<double> HolmAdjust(std::span<const double> p) {
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&p](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::vector<double> out(m);
  double running = 0.0;
  for (std::size_t rank = 0; rank < m; ++rank) {
    const double adj = std::min(1.0, static_cast<double>(m - rank) * p[order[rank]]);
    running = std::max(running, adj);
    out[order[rank]] = running;
  }
  return out;
}

std::string Stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

std::vector<PairwiseResult> PairwiseHolm(const Matrix& m) {
  CheckMatrix(m);
  const std::size_t n = m.size();
  const std::size_t k = m.front().size();
  std::vector<PairwiseResult> out;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      std::vector<double> d(n);
      for (std::size_t i = 0; i < n; ++i) d[i] = m[i][a] - m[i][b];
      const double mean = Mean(d);
      double ss = 0.0;
      for (double v : d) ss += (v - mean) * (v - mean);
      const double sd = std::sqrt(ss / static_cast<double>(n - 1));
      PairwiseResult r;
      r.a = a;
      r.b = b;
      r.df = static_cast<double>(n - 1);
      double scale = 0.0;
      for (double v : d) scale = std::max(scale, std::abs(v));
      if (sd <= 1e-12 * scale || sd == 0.0) {
        r.t = std::abs(mean) <= 1e-12 * scale || mean == 0.0
                  ? 0.0
                  : std::copysign(std::numeric_limits<double>::infinity(), mean);
        r.p_raw = r.t == 0.0 ? 1.0 : 0.0;
      } else {
        r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
        r.p_raw = StudentTTwoSided(r.t, r.df);
      }
      out.push_back(r);
    }
  }
  std::vector<double> raw;
  for (const auto& r : out) raw.push_back(r.p_raw);
  const auto adj = HolmAdjust(raw);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].p_holm = adj[i];
    out[i].stars = Stars(adj[i]);
  }
  return out;
}

std::vector<ErrorSample> ExtractSamples(const SessionLog& log) {
  std::vector<ErrorSample> out;
  std::map<int, int> stage1_index;  // per sonification
  for (const LogRecord& rec : log.records) {
    const auto* t = std::get_if<TrialRecord>(&rec);
    if (t == nullptr) continue;
    int phase = 0;
    if (t->stage_id == 1) {
      phase = stage1_index[static_cast<int>(t->sonification)]++ / 5 + 1;
    }
    if (t->aborted || !t->placed) continue;
    ErrorSample s;
    s.participant_id = log.header.participant_id;
    s.sonification = t->sonification;
    s.stage = t->stage_id;
    s.phase = phase;
    s.axis = ErrorAxis::kDepth;
    s.error = t->abs_depth_error_cm;
    s.target = t->target.depth.value * 100.0;
    s.placed = t->placed->depth.value * 100.0;
    out.push_back(s);
    if (t->abs_azimuth_error_deg && t->target.azimuth && t->placed->azimuth) {
      s.axis = ErrorAxis::kAzimuth;
      s.error = *t->abs_azimuth_error_deg;
      s.target = t->target.azimuth->value;
      s.placed = t->placed->azimuth->value;
      out.push_back(s);
    }
  }
  return out;
}

StatsReport BuildReport(std::span<const SessionLog> logs, int stage) {
  if (logs.empty()) throw Error(ErrorCode::kInsufficient, "no session logs to analyze");
  StatsReport report;
  report.logs = logs.size();
  std::vector<ErrorSample> samples;
  for (const SessionLog& log : logs) {
    for (ErrorSample& s : ExtractSamples(log)) {
      if (stage == 0 || s.stage == stage) samples.push_back(std::move(s));
    }
  }
  if (samples.empty()) {
    throw Error(ErrorCode::kInsufficient, stage == 0
                                              ? "logs contain no completed positioning trials"
                                              : "no completed positioning trials in stage " +
                                                    std::to_string(stage));
  }
  for (const ErrorSample& s : samples) {
    if (s.axis == ErrorAxis::kDepth) ++report.trials;
  }

  const double depth_chance = ChanceLevel(0.0, 100.0);
  const double az_chance = ChanceLevel(-90.0, 90.0);
  std::vector<ErrorSample> depth_s, az_s;
  for (const ErrorSample& s : samples) {
    (s.axis == ErrorAxis::kDepth ? depth_s : az_s).push_back(s);
  }
  report.failures = ScreenFailures(depth_s, depth_chance);
  for (FailureFlag& f : ScreenFailures(az_s, az_chance)) report.failures.push_back(f);

  std::set<std::tuple<std::string, int, int, int>> failed;
  for (const FailureFlag& f : report.failures) {
    if (f.failed) {
      failed.insert({f.participant_id, static_cast<int>(f.sonification), f.stage,
                     static_cast<int>(f.axis)});
    }
  }

  std::set<int> stages;
  for (const ErrorSample& s : samples) stages.insert(s.stage);

  for (int st : stages) {
    for (ErrorAxis axis : {ErrorAxis::kDepth, ErrorAxis::kAzimuth}) {
      // Boxplots per sonification and phase; stage 1 also gets a pooled row.
      std::map<std::pair<int, int>, std::vector<double>> groups;
      for (const ErrorSample& s : samples) {
        if (s.stage != st || s.axis != axis) continue;
        groups[{static_cast<int>(s.sonification), s.phase}].push_back(s.error);
        if (s.phase != 0) groups[{static_cast<int>(s.sonification), 0}].push_back(s.error);
      }
      for (const auto& [key, errors] : groups) {
        BoxplotRow row;
        row.stage = st;
        row.sonification = static_cast<SonificationKind>(key.first);
        row.phase = key.second;
        row.axis = axis;
        row.stats = ComputeBoxplot(errors);
        if (row.stats.n == 1) {
          report.notes.push_back("stage " + std::to_string(st) + " " +
                                 std::string(KindLabel(row.sonification)) + " " +
                                 std::string(AxisName(axis)) + ": n=1");
        }
        report.boxplots.push_back(std::move(row));
      }

      // Regressions on pooled, non-failed data.
      for (SonificationKind kind : kAllKinds) {
        std::vector<double> x, y;
        bool any = false;
        for (const ErrorSample& s : samples) {
          if (s.stage != st || s.axis != axis || s.sonification != kind) continue;
          any = true;
          if (failed.count({s.participant_id, static_cast<int>(kind), st,
                            static_cast<int>(axis)})) {
            continue;
          }
          x.push_back(s.target);
          y.push_back(s.placed);
        }
        if (!any) continue;
        const std::string label = "stage " + std::to_string(st) + " " +
                                  std::string(KindLabel(kind)) + " " +
                                  std::string(AxisName(axis));
        try {
          report.regressions.push_back({st, kind, axis, FitRegression(x, y)});
        } catch (const Error& e) {
          report.notes.push_back(label + ": regression skipped (n=" +
                                 std::to_string(x.size()) + "): " + e.what());
        }
      }

      // Participant x sonification means for the repeated-measures tests.
      std::map<std::string, std::map<int, std::pair<double, int>>> cells;
      std::set<int> conds;
      for (const ErrorSample& s : samples) {
        if (s.stage != st || s.axis != axis) continue;
        auto& c = cells[s.participant_id][static_cast<int>(s.sonification)];
        c.first += s.error;
        ++c.second;
        conds.insert(static_cast<int>(s.sonification));
      }
      if (cells.empty()) continue;
      Matrix m;
      std::size_t dropped = 0;
      for (const auto& [pid, row] : cells) {
        if (row.size() != conds.size()) {
          ++dropped;
          continue;
        }
        std::vector<double> r;
        for (int c : conds) r.push_back(row.at(c).first / row.at(c).second);
        m.push_back(std::move(r));
      }
      const std::string label = "stage " + std::to_string(st) + " " +
                                std::string(AxisName(axis));
      if (dropped > 0) {
        report.notes.push_back(label + ": " + std::to_string(dropped) +
                               " participant(s) without every sonification excluded from tests");
      }
      if (m.size() < 3 || conds.size() < 2) {
        report.notes.push_back(label + ": ANOVA and pairwise tests skipped (participants=" +
                               std::to_string(m.size()) + ", sonifications=" +
                               std::to_string(conds.size()) + ")");
        continue;
      }
      std::vector<SonificationKind> kinds;
      for (int c : conds) kinds.push_back(static_cast<SonificationKind>(c));
      report.anova.push_back({st, axis, kinds, RmAnova(m)});
      for (const PairwiseResult& p : PairwiseHolm(m)) {
        report.pairwise.push_back({st, axis, kinds[p.a], kinds[p.b], m.size(), p});
      }
    }
  }
  return report;
}

std::vector<SessionLog> LoadLogs(const std::filesystem::path& path) {
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(path)) {
    for (const auto& entry : std::filesystem::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
  } else if (std::filesystem::exists(path)) {
    files.push_back(path);
  } else {
    throw Error(ErrorCode::kIo, "no such log file or directory: " + path.string());
  }
  if (files.empty()) throw Error(ErrorCode::kInsufficient, "no *.jsonl logs in " + path.string());
  std::vector<SessionLog> logs;
  for (const auto& f : files) logs.push_back(ReadLog(f));
  return logs;
}

std::string SummaryText(const StatsReport& r) {
  std::ostringstream out;
  out << "Sessions: " << r.logs << "\nPositioning trials: " << r.trials << "\n\n";
  out << "Chance level: depth " << Fixed(ChanceLevel(0, 100), 2) << " cm, azimuth "
      << Fixed(ChanceLevel(-90, 90), 2) << " deg\n\n";
  out << "Error summaries (median [q1, q3], mean):\n";
  for (const BoxplotRow& b : r.boxplots) {
    out << "  stage " << b.stage << " " << KindLabel(b.sonification) << " "
        << AxisName(b.axis) << (b.phase > 0 ? " block " + std::to_string(b.phase) : "")
        << ": n=" << b.stats.n << " median " << Fixed(b.stats.median, 2) << " ["
        << Fixed(b.stats.q1, 2) << ", " << Fixed(b.stats.q3, 2) << "], mean "
        << Fixed(b.stats.mean, 2) << ", outliers " << b.stats.outliers.size() << "\n";
  }
  out << "\nAbove chance (excluded from regressions):\n";
  bool any = false;
  for (const FailureFlag& f : r.failures) {
    if (!f.failed) continue;
    any = true;
    out << "  " << f.participant_id << " stage " << f.stage << " "
        << KindLabel(f.sonification) << " " << AxisName(f.axis) << ": mean "
        << Fixed(f.mean_error, 2) << " over " << f.n << " trials\n";
  }
  if (!any) out << "  none\n";
  out << "\nRegressions (placed on target):\n";
  for (const RegressionRow& g : r.regressions) {
    out << "  stage " << g.stage << " " << KindLabel(g.sonification) << " "
        << AxisName(g.axis) << ": slope " << Fixed(g.fit.slope, 3) << ", intercept "
        << Fixed(g.fit.intercept, 2) << ", R2 " << Fixed(g.fit.r_squared, 3) << ", n "
        << g.fit.n << "\n";
  }
  out << "\nRepeated-measures ANOVA (Greenhouse-Geisser):\n";
  for (const AnovaRow& a : r.anova) {
    out << "  stage " << a.stage << " " << AxisName(a.axis) << ": F(" << Fixed(a.result.df1_gg, 2)
        << ", " << Fixed(a.result.df2_gg, 2) << ") = " << Fixed(a.result.f, 3) << ", p = "
        << Num(a.result.p_value) << ", epsilon " << Fixed(a.result.epsilon, 3) << "\n";
  }
  out << "\nPairwise paired t-tests (Holm):\n";
  for (const PairwiseRow& p : r.pairwise) {
    out << "  stage " << p.stage << " " << AxisName(p.axis) << " " << KindLabel(p.a)
        << " vs " << KindLabel(p.b) << ": t(" << Fixed(p.result.df, 0) << ") = "
        << Fixed(p.result.t, 3) << ", p_holm = " << Num(p.result.p_holm) << " "
        << p.result.stars << "\n";
  }
  if (!r.notes.empty()) {
    out << "\nNotes:\n";
    for (const std::string& n : r.notes) out << "  " << n << "\n";
  }
  return out.str();
}

void WriteReport(const StatsReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&dir](const char* name) {
    std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::kIo, "cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("summary.txt");
    f << SummaryText(r);
  }
  {
    auto f = open("boxplots.csv");
    f << "stage,sonification,phase,axis,n,q1,median,q3,mean,whisker_low,whisker_high,outliers\n";
    for (const BoxplotRow& b : r.boxplots) {
      f << b.stage << ',' << KindLabel(b.sonification) << ',' << b.phase << ','
        << AxisName(b.axis) << ',' << b.stats.n << ',' << Num(b.stats.q1) << ','
        << Num(b.stats.median) << ',' << Num(b.stats.q3) << ',' << Num(b.stats.mean) << ','
        << Num(b.stats.whisker_low) << ',' << Num(b.stats.whisker_high) << ','
        << Join(b.stats.outliers, ";") << '\n';
    }
  }
  {
    auto f = open("failures.csv");
    f << "participant,stage,sonification,axis,n,mean_error,failed\n";
    for (const FailureFlag& x : r.failures) {
      f << x.participant_id << ',' << x.stage << ',' << KindLabel(x.sonification) << ','
        << AxisName(x.axis) << ',' << x.n << ',' << Num(x.mean_error) << ','
        << (x.failed ? "true" : "false") << '\n';
    }
  }
  {
    auto f = open("regressions.csv");
    f << "stage,sonification,axis,n,slope,intercept,r_squared,p_value,bias_low,bias_high\n";
    for (const RegressionRow& g : r.regressions) {
      const double lo = g.axis == ErrorAxis::kDepth ? 0.0 : -90.0;
      const double hi = g.axis == ErrorAxis::kDepth ? 100.0 : 90.0;
      f << g.stage << ',' << KindLabel(g.sonification) << ',' << AxisName(g.axis) << ','
        << g.fit.n << ',' << Num(g.fit.slope) << ',' << Num(g.fit.intercept) << ','
        << Num(g.fit.r_squared) << ',' << Num(g.fit.p_value) << ',' << Num(g.fit.Bias(lo))
        << ',' << Num(g.fit.Bias(hi)) << '\n';
    }
  }
  {
    auto f = open("anova.csv");
    f << "stage,axis,participants,conditions,F,df1,df2,epsilon,df1_gg,df2_gg,p_uncorrected,p_gg\n";
    for (const AnovaRow& a : r.anova) {
      f << a.stage << ',' << AxisName(a.axis) << ',' << a.result.n << ',' << a.result.k << ','
        << Num(a.result.f) << ',' << Num(a.result.df1) << ',' << Num(a.result.df2) << ','
        << Num(a.result.epsilon) << ',' << Num(a.result.df1_gg) << ','
        << Num(a.result.df2_gg) << ',' << Num(a.result.p_uncorrected) << ','
        << Num(a.result.p_value) << '\n';
    }
  }
  {
    auto f = open("pairwise.csv");
    f << "stage,axis,a,b,n,t,df,p_raw,p_holm,stars\n";
    for (const PairwiseRow& p : r.pairwise) {
      f << p.stage << ',' << AxisName(p.axis) << ',' << KindLabel(p.a) << ','
        << KindLabel(p.b) << ',' << p.n << ',' << Num(p.result.t) << ','
        << Num(p.result.df) << ',' << Num(p.result.p_raw) << ',' << Num(p.result.p_holm)
        << ',' << p.result.stars << '\n';
    }
  }
}

}  // namespace sonify
