// Copyright (c) 2026 the spacings developers.
// SPDX-License-Identifier: Apache-2.0

#include "spacings/simulate.hpp"

#include "spacings/exact_dist.hpp"
#include "spacings/moments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace spacings {

namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kSeedSalt = 0x5851f42d4c957f2dULL;
constexpr std::uint64_t kBlockSize = 1u << 16;

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

std::string_view to_string(Representation rep) {
  return rep == Representation::UniformSort ? "uniform-sort" : "exponential-ratio";
}

Representation representation_from_string(std::string_view s) {
  if (s == "uniform-sort" || s == "uniform" || s == "usort") return Representation::UniformSort;
  if (s == "exponential-ratio" || s == "expratio" || s == "exponential")
    return Representation::ExponentialRatio;
  throw std::invalid_argument("unknown representation: \"" + std::string(s) + "\"");
}

void SimConfig::validate() const {
  if (n < 1) throw std::domain_error("n must be >= 1");
  if (samples < 1) throw std::domain_error("samples must be >= 1");
  if (streams < 1) throw std::domain_error("streams must be >= 1");
}

SampleRng::SampleRng(std::uint64_t seed, std::uint64_t sample_index)
    : state_(mix64(seed ^ kSeedSalt) ^ mix64(sample_index + kGamma)) {}

std::uint64_t SampleRng::next_u64() {
  state_ += kGamma;
  return mix64(state_);
}

double SampleRng::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

void sample_gaps_at(long n, Representation rep, std::uint64_t seed, std::uint64_t sample_index,
                    std::vector<double>& out) {
  SampleRng rng(seed, sample_index);
  const std::size_t count = static_cast<std::size_t>(n) + 1;
  out.clear();
  if (rep == Representation::UniformSort) {
    out.resize(count - 1);
    for (double& u : out) u = rng.next_unit();
    std::sort(out.begin(), out.end());
    out.push_back(1.0);
    double prev = 0.0;
    for (double& g : out) {
      double cur = g;
      g = cur - prev;
      prev = cur;
    }
  } else {
    out.resize(count);
    for (double& g : out) g = -std::log1p(-rng.next_unit());
  }
  std::sort(out.begin(), out.end());
  double total = std::accumulate(out.begin(), out.end(), 0.0);
  if (total > 0.0) {
    for (double& g : out) g /= total;
  }
}

GapStream::GapStream(SimConfig cfg) : cfg_(cfg) { cfg_.validate(); }

bool GapStream::next(std::vector<double>& out) {
  if (index_ >= cfg_.samples) return false;
  sample_gaps_at(cfg_.n, cfg_.representation, cfg_.seed, index_, out);
  ++index_;
  return true;
}

std::string Query::label() const {
  std::string s;
  switch (kind) {
    case Kind::Survival: s = "survival k=" + std::to_string(index); break;
    case Kind::Band: s = "band m=" + std::to_string(index); break;
    case Kind::Mean: s = "mean k=" + std::to_string(index); break;
  }
  if (x.has_value()) s += " x=" + x->str();
  return s;
}

namespace {

struct BlockAccum {
  // one histogram per threshold: bin c = number of samples whose count of
  // gaps <= x equals c (c in 0..n+1)
  std::vector<std::vector<std::uint32_t>> hist;
  std::vector<double> sum;    // per rank, for mean queries
  std::vector<double> sumsq;
};

struct ProportionStats {
  double p_hat;
  double se;
};

ProportionStats proportion(std::uint64_t count, std::uint64_t samples) {
  double p = static_cast<double>(count) / static_cast<double>(samples);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

// z against the exact-based null standard error; deterministic events get
// z = 0 on agreement and +inf on any deviation.
double z_score_proportion(double p_hat, double p_exact, std::uint64_t samples) {
  if (p_exact <= 0.0 || p_exact >= 1.0) {
    return p_hat == p_exact ? 0.0 : std::numeric_limits<double>::infinity();
  }
  double se0 = std::sqrt(p_exact * (1.0 - p_exact) / static_cast<double>(samples));
  return (p_hat - p_exact) / se0;
}

}  // namespace

SimReport run_queries(const SimConfig& cfg, const std::vector<Query>& queries, bool attach_exact,
                      double alarm_threshold) {
  cfg.validate();
  const long n = cfg.n;
  const std::size_t bins = static_cast<std::size_t>(n) + 2;

  SimReport report;
  report.config = cfg;
  report.alarm_threshold = alarm_threshold;
  report.entries.resize(queries.size());

  // validate queries up front; invalid ones become error entries
  std::vector<bool> usable(queries.size(), true);
  bool any_mean = false;
  std::vector<Rational> thresholds;
  std::vector<std::size_t> x_slot(queries.size(), SIZE_MAX);
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    const Query& q = queries[qi];
    report.entries[qi].query = q;
    try {
      switch (q.kind) {
        case Query::Kind::Survival:
        case Query::Kind::Mean:
          if (q.index < 1 || q.index > n + 1)
            throw std::domain_error("rank k = " + std::to_string(q.index) +
                                    " out of range [1, n+1]");
          break;
        case Query::Kind::Band:
          if (q.index < 0 || q.index > n + 1)
            throw std::domain_error("count m = " + std::to_string(q.index) +
                                    " out of range [0, n+1]");
          break;
      }
      if (q.kind == Query::Kind::Mean) {
        any_mean = true;
        if (q.x.has_value()) throw std::domain_error("mean query takes no threshold");
      } else {
        if (!q.x.has_value()) throw std::domain_error("threshold x required");
        if (!(*q.x > Rational(0) && *q.x < Rational(1)))
          throw std::domain_error("x = " + q.x->str() + " outside (0, 1)");
        auto it = std::find(thresholds.begin(), thresholds.end(), *q.x);
        if (it == thresholds.end()) {
          thresholds.push_back(*q.x);
          x_slot[qi] = thresholds.size() - 1;
        } else {
          x_slot[qi] = static_cast<std::size_t>(it - thresholds.begin());
        }
      }
    } catch (const std::exception& e) {
      report.entries[qi].error = e.what();
      usable[qi] = false;
    }
  }

  std::vector<double> xd(thresholds.size());
  for (std::size_t i = 0; i < thresholds.size(); ++i) xd[i] = thresholds[i].to_double();

  const std::uint64_t nblocks = (cfg.samples + kBlockSize - 1) / kBlockSize;
  std::vector<BlockAccum> accums(nblocks);

  std::atomic<std::uint64_t> next_block{0};
  auto worker = [&] {
    std::vector<double> gaps;
    for (;;) {
      std::uint64_t b = next_block.fetch_add(1);
      if (b >= nblocks) return;
      BlockAccum& acc = accums[b];
      acc.hist.assign(xd.size(), std::vector<std::uint32_t>(bins, 0));
      if (any_mean) {
        acc.sum.assign(bins - 1, 0.0);
        acc.sumsq.assign(bins - 1, 0.0);
      }
      const std::uint64_t lo = b * kBlockSize;
      const std::uint64_t hi = std::min(cfg.samples, lo + kBlockSize);
      for (std::uint64_t i = lo; i < hi; ++i) {
        sample_gaps_at(n, cfg.representation, cfg.seed, i, gaps);
        for (std::size_t xi = 0; xi < xd.size(); ++xi) {
          auto it = std::upper_bound(gaps.begin(), gaps.end(), xd[xi]);
          acc.hist[xi][static_cast<std::size_t>(it - gaps.begin())]++;
        }
        if (any_mean) {
          for (std::size_t r = 0; r + 1 < bins; ++r) {
            acc.sum[r] += gaps[r];
            acc.sumsq[r] += gaps[r] * gaps[r];
          }
        }
      }
    }
  };

  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(cfg.streams, nblocks));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // merge in block order so floating accumulations are schedule-independent
  std::vector<std::vector<std::uint64_t>> hist(xd.size(), std::vector<std::uint64_t>(bins, 0));
  std::vector<double> sum(bins - 1, 0.0), sumsq(bins - 1, 0.0);
  for (const BlockAccum& acc : accums) {
    for (std::size_t xi = 0; xi < xd.size(); ++xi)
      for (std::size_t c = 0; c < bins; ++c) hist[xi][c] += acc.hist[xi][c];
    if (any_mean) {
      for (std::size_t r = 0; r + 1 < bins; ++r) {
        sum[r] += acc.sum[r];
        sumsq[r] += acc.sumsq[r];
      }
    }
  }

  const double nd = static_cast<double>(cfg.samples);
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    if (!usable[qi]) continue;
    const Query& q = queries[qi];
    ReportEntry& entry = report.entries[qi];

    if (q.kind == Query::Kind::Mean) {
      double mean = sum[static_cast<std::size_t>(q.index - 1)] / nd;
      double var = 0.0;
      if (cfg.samples > 1) {
        var = (sumsq[static_cast<std::size_t>(q.index - 1)] - nd * mean * mean) / (nd - 1.0);
        var = std::max(var, 0.0);
      }
      entry.estimate = {mean, std::sqrt(var / nd)};
    } else {
      std::uint64_t count = 0;
      const auto& h = hist[x_slot[qi]];
      if (q.kind == Query::Kind::Survival) {
        // G_(k) > x  <=>  at most k-1 gaps are <= x
        for (long c = 0; c < q.index; ++c) count += h[static_cast<std::size_t>(c)];
      } else {
        // exactly m gaps exceed x  <=>  exactly n+1-m gaps are <= x
        count = h[static_cast<std::size_t>(n + 1 - q.index)];
      }
      auto st = proportion(count, cfg.samples);
      entry.estimate = {st.p_hat, st.se};
    }

    if (!attach_exact) continue;
    try {
      Rational exact;
      switch (q.kind) {
        case Query::Kind::Survival: exact = survival_exact(GapSpec{n, q.index}, *q.x); break;
        case Query::Kind::Band: exact = band_probability_exact(n, q.index, *q.x); break;
        case Query::Kind::Mean: exact = expected_gap(GapSpec{n, q.index}); break;
      }
      entry.exact = exact;
      double ex = exact.to_double();
      double z;
      if (q.kind == Query::Kind::Mean) {
        z = entry.estimate.se > 0.0
                ? (entry.estimate.value - ex) / entry.estimate.se
                : (entry.estimate.value == ex ? 0.0 : std::numeric_limits<double>::infinity());
      } else {
        z = z_score_proportion(entry.estimate.value, ex, cfg.samples);
      }
      entry.z = z;
      entry.alarm = !(std::fabs(z) <= alarm_threshold);
      if (entry.alarm) ++report.alarm_count;
    } catch (const std::exception& e) {
      entry.error = e.what();
    }
  }
  return report;
}

ReportEntry estimate_survival(const SimConfig& cfg, long k, const Rational& x) {
  return run_queries(cfg, {Query{Query::Kind::Survival, k, x}}, false).entries.at(0);
}

ReportEntry estimate_band(const SimConfig& cfg, long m, const Rational& x) {
  return run_queries(cfg, {Query{Query::Kind::Band, m, x}}, false).entries.at(0);
}

ReportEntry estimate_mean(const SimConfig& cfg, long k) {
  return run_queries(cfg, {Query{Query::Kind::Mean, k, std::nullopt}}, false).entries.at(0);
}

SimReport verify(const SimConfig& cfg, const std::vector<Query>& queries, double alarm_threshold) {
  return run_queries(cfg, queries, true, alarm_threshold);
}

std::vector<Query> standard_query_grid(long n, const std::vector<Rational>& thresholds) {
  std::vector<Query> queries;
  for (const Rational& x : thresholds) {
    for (long k = 1; k <= n + 1; ++k) queries.push_back({Query::Kind::Survival, k, x});
    for (long m = 0; m <= n + 1; ++m) queries.push_back({Query::Kind::Band, m, x});
  }
  for (long k = 1; k <= n + 1; ++k) queries.push_back({Query::Kind::Mean, k, std::nullopt});
  return queries;
}

std::vector<Rational> default_threshold_grid() {
  std::vector<Rational> xs;
  xs.reserve(19);
  for (long r = 1; r <= 19; ++r) xs.emplace_back(r, 20L);
  return xs;
}

nlohmann::json SimReport::to_json(int digits) const {
  nlohmann::json meta{
      {"n", config.n},
      {"samples", config.samples},
      {"seed", config.seed},
      {"representation", std::string(to_string(config.representation))},
      {"streams", config.streams},
      {"alarm_threshold", alarm_threshold},
      {"alarms", alarm_count},
  };
  nlohmann::json entries_json = nlohmann::json::array();
  for (const ReportEntry& e : entries) {
    nlohmann::json query{{"kind", e.query.kind == Query::Kind::Survival
                                      ? "survival"
                                      : (e.query.kind == Query::Kind::Band ? "band" : "mean")}};
    query[e.query.kind == Query::Kind::Band ? "m" : "k"] = e.query.index;
    if (e.query.x.has_value()) query["x"] = e.query.x->str();
    nlohmann::json row{{"query", query}};
    if (e.error.has_value()) {
      row["error"] = *e.error;
    } else {
      row["estimate"] = e.estimate.value;
      row["se"] = e.estimate.se;
      if (e.exact.has_value()) {
        row["exact"] = e.exact->str();
        row["exact_decimal"] = e.exact->decimal(digits);
      }
      if (e.z.has_value()) {
        if (std::isfinite(*e.z)) {
          row["z"] = *e.z;
        } else {
          row["z"] = *e.z > 0 ? "inf" : "-inf";
        }
        row["alarm"] = e.alarm;
      }
    }
    entries_json.push_back(std::move(row));
  }
  return nlohmann::json{{"meta", std::move(meta)}, {"queries", std::move(entries_json)}};
}

}  // namespace spacings
