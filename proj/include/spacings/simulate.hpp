// Copyright (c) 2026 the spacings developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "spacings/rational.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spacings {

// Two equivalent-in-distribution ways to draw the n+1 spacings:
//   UniformSort      - sort n uniforms, take consecutive differences
//   ExponentialRatio - n+1 standard exponentials divided by their sum
enum class Representation { UniformSort, ExponentialRatio };

std::string_view to_string(Representation rep);
Representation representation_from_string(std::string_view s);

struct SimConfig {
  long n = 1;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 0;
  Representation representation = Representation::UniformSort;
  unsigned streams = 1;  // worker parallelism; never changes the estimates
  void validate() const;
};

// Counter-style generator.  Every sample index owns an independent substream
// derived from (seed, index), so the draws are a pure function of the
// sample index and results cannot depend on thread scheduling or on how
// samples are partitioned across streams.
class SampleRng {
 public:
  SampleRng(std::uint64_t seed, std::uint64_t sample_index);
  std::uint64_t next_u64();
  double next_unit();  // [0, 1), 53 random bits

 private:
  std::uint64_t state_;
};

// The gap vector of one sample: sorted ascending, renormalized to sum 1.
// out.size() == n+1 on return.
void sample_gaps_at(long n, Representation rep, std::uint64_t seed, std::uint64_t sample_index,
                    std::vector<double>& out);

// Sequential front end over sample_gaps_at.
class GapStream {
 public:
  explicit GapStream(SimConfig cfg);
  bool next(std::vector<double>& out);  // false once cfg.samples are done
  const SimConfig& config() const { return cfg_; }

 private:
  SimConfig cfg_;
  std::uint64_t index_ = 0;
};

struct Query {
  enum class Kind { Survival, Band, Mean };
  Kind kind = Kind::Survival;
  long index = 1;               // k for Survival/Mean, m for Band
  std::optional<Rational> x;    // threshold; absent for Mean
  std::string label() const;
};

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

struct ReportEntry {
  Query query;
  Estimate estimate;
  std::optional<Rational> exact;
  std::optional<double> z;            // standardized discrepancy vs exact
  bool alarm = false;                 // |z| above the alarm threshold
  std::optional<std::string> error;   // exact-side failure; batch continues
};

struct SimReport {
  SimConfig config;
  double alarm_threshold = 4.0;
  std::size_t alarm_count = 0;
  std::vector<ReportEntry> entries;
  nlohmann::json to_json(int digits = 15) const;
};

// Estimate all queries in one pass over the samples.  With attach_exact the
// reference values are computed, z-scores filled in, and |z| > threshold
// flagged.  Exact-side errors are recorded per query, never thrown.
SimReport run_queries(const SimConfig& cfg, const std::vector<Query>& queries, bool attach_exact,
                      double alarm_threshold = 4.0);

ReportEntry estimate_survival(const SimConfig& cfg, long k, const Rational& x);
ReportEntry estimate_band(const SimConfig& cfg, long m, const Rational& x);
ReportEntry estimate_mean(const SimConfig& cfg, long k);

// run_queries with exact values attached: the cross-check harness.
SimReport verify(const SimConfig& cfg, const std::vector<Query>& queries,
                 double alarm_threshold = 4.0);

// Survival for every k, band for every m (at each threshold), mean for
// every k: the standard verification battery.
std::vector<Query> standard_query_grid(long n, const std::vector<Rational>& thresholds);

// x = 1/20, 2/20, ..., 19/20.
std::vector<Rational> default_threshold_grid();

}  // namespace spacings
