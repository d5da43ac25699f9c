/*
 * Copyright 2026 The ehrflow Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ehrflow/automl/tuner.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

#include "ehrflow/automl/cv.h"
#include "ehrflow/csv.h"
#include "ehrflow/error.h"

namespace ehrflow::automl {

namespace {

constexpr double kFailed = -std::numeric_limits<double>::infinity();

// A point in the unit cube (numeric dims) plus choice indices.
using Point = std::vector<double>;

double Lo(const Domain& d) {
  const double lo = d.kind == Domain::Kind::kInteger ? d.lo - 0.5 : d.lo;
  return d.log ? std::log(std::max(lo, d.lo * 0.5)) : lo;
}

double Hi(const Domain& d) {
  const double hi = d.kind == Domain::Kind::kInteger ? d.hi + 0.5 : d.hi;
  return d.log ? std::log(hi) : hi;
}

ParamValue Decode(const Domain& d, double u) {
  if (d.kind == Domain::Kind::kCategorical) {
    return d.choices[static_cast<size_t>(u)];
  }
  double v = Lo(d) + std::clamp(u, 0.0, 1.0) * (Hi(d) - Lo(d));
  if (d.log) v = std::exp(v);
  if (d.kind == Domain::Kind::kInteger) {
    return static_cast<int64_t>(std::clamp(std::round(v), d.lo, d.hi));
  }
  return std::clamp(v, d.lo, d.hi);
}

// Unit coordinate of a decoded value (integers map to their bucket center).
double Encode(const Domain& d, const ParamValue& v) {
  if (d.kind == Domain::Kind::kCategorical) {
    const auto& s = std::get<std::string>(v);
    return static_cast<double>(
        std::find(d.choices.begin(), d.choices.end(), s) - d.choices.begin());
  }
  double x = std::holds_alternative<int64_t>(v)
                 ? static_cast<double>(std::get<int64_t>(v))
                 : std::get<double>(v);
  if (d.log) x = std::log(x);
  return std::clamp((x - Lo(d)) / (Hi(d) - Lo(d)), 0.0, 1.0);
}

ParamMap DecodePoint(const HyperparamSpace& space, const Point& p) {
  ParamMap out;
  for (size_t i = 0; i < space.dims.size(); ++i) {
    out[space.dims[i].name] = Decode(space.dims[i].domain, p[i]);
  }
  return out;
}

Point RandomPoint(const HyperparamSpace& space, std::mt19937_64& rng) {
  Point p;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& dim : space.dims) {
    if (dim.domain.kind == Domain::Kind::kCategorical) {
      std::uniform_int_distribution<size_t> pick(0, dim.domain.choices.size() - 1);
      p.push_back(static_cast<double>(pick(rng)));
    } else {
      p.push_back(unit(rng));
    }
  }
  return p;
}

double NormalCdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Equal-weight mixture of normals truncated to [0, 1] with a broad prior
// component at the center; bandwidths from neighbor gaps.
class Parzen {
 public:
  explicit Parzen(std::vector<double> obs) {
    std::vector<double> mus = std::move(obs);
    mus.push_back(0.5);
    std::sort(mus.begin(), mus.end());
    const double min_sigma = 1.0 / std::min(100.0, static_cast<double>(mus.size()) + 1.0);
    bool prior_seen = false;
    for (size_t i = 0; i < mus.size(); ++i) {
      double sigma;
      if (!prior_seen && mus[i] == 0.5) {
        prior_seen = true;
        sigma = 1.0;
      } else {
        const double left = i > 0 ? mus[i] - mus[i - 1] : mus[i];
        const double right = i + 1 < mus.size() ? mus[i + 1] - mus[i] : 1.0 - mus[i];
        sigma = std::clamp(std::max(left, right), min_sigma, 1.0);
      }
      const double z = NormalCdf((1.0 - mus[i]) / sigma) - NormalCdf(-mus[i] / sigma);
      comps_.push_back({mus[i], sigma, std::max(z, 1e-300)});
    }
  }

  double Sample(std::mt19937_64& rng) const {
    std::uniform_int_distribution<size_t> pick(0, comps_.size() - 1);
    const Comp& c = comps_[pick(rng)];
    std::normal_distribution<double> normal(c.mu, c.sigma);
    for (int tries = 0; tries < 100; ++tries) {
      const double x = normal(rng);
      if (x >= 0.0 && x <= 1.0) return x;
    }
    return std::clamp(c.mu, 0.0, 1.0);
  }

  double LogDensity(double x) const {
    double sum = 0.0;
    for (const auto& c : comps_) {
      const double z = (x - c.mu) / c.sigma;
      sum += std::exp(-0.5 * z * z) / (c.sigma * std::sqrt(2.0 * std::numbers::pi) * c.mass);
    }
    return std::log(std::max(sum / static_cast<double>(comps_.size()), 1e-300));
  }

 private:
  struct Comp {
    double mu;
    double sigma;
    double mass;
  };
  std::vector<Comp> comps_;
};

class Categorical {
 public:
  Categorical(const std::vector<double>& obs, size_t k) : probs_(k, 1.0) {
    for (double o : obs) probs_[static_cast<size_t>(o)] += 1.0;
    const double total = static_cast<double>(obs.size() + k);
    for (auto& p : probs_) p /= total;
  }

  double Sample(std::mt19937_64& rng) const {
    std::discrete_distribution<size_t> pick(probs_.begin(), probs_.end());
    return static_cast<double>(pick(rng));
  }

  double LogDensity(double x) const { return std::log(probs_[static_cast<size_t>(x)]); }

 private:
  std::vector<double> probs_;
};

Point Propose(const HyperparamSpace& space, const std::vector<Point>& points,
              const std::vector<TrialRecord>& trials, const TunerOptions& options,
              std::mt19937_64& rng) {
  std::vector<size_t> order(trials.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return trials[a].mean_score > trials[b].mean_score;
  });
  const size_t n_good = std::clamp<size_t>(
      static_cast<size_t>(std::ceil(options.gamma * static_cast<double>(trials.size()))),
      1, trials.size());

  struct DimModel {
    std::optional<Parzen> good_num, bad_num;
    std::optional<Categorical> good_cat, bad_cat;
  };
  std::vector<DimModel> models(space.dims.size());
  for (size_t d = 0; d < space.dims.size(); ++d) {
    std::vector<double> good, bad;
    for (size_t r = 0; r < order.size(); ++r) {
      (r < n_good ? good : bad).push_back(points[order[r]][d]);
    }
    const Domain& dom = space.dims[d].domain;
    if (dom.kind == Domain::Kind::kCategorical) {
      models[d].good_cat.emplace(good, dom.choices.size());
      models[d].bad_cat.emplace(bad, dom.choices.size());
    } else {
      models[d].good_num.emplace(good);
      models[d].bad_num.emplace(bad);
    }
  }

  Point best;
  double best_ratio = -std::numeric_limits<double>::infinity();
  for (size_t c = 0; c < std::max<size_t>(1, options.n_candidates); ++c) {
    Point cand(space.dims.size());
    double ratio = 0.0;
    for (size_t d = 0; d < space.dims.size(); ++d) {
      const DimModel& m = models[d];
      if (m.good_cat) {
        cand[d] = m.good_cat->Sample(rng);
        ratio += m.good_cat->LogDensity(cand[d]) - m.bad_cat->LogDensity(cand[d]);
      } else {
        cand[d] = m.good_num->Sample(rng);
        ratio += m.good_num->LogDensity(cand[d]) - m.bad_num->LogDensity(cand[d]);
      }
    }
    if (best.empty() || ratio > best_ratio) {
      best = std::move(cand);
      best_ratio = ratio;
    }
  }
  return best;
}

}  // namespace

ParamMap SampleUniform(const HyperparamSpace& space, uint64_t seed) {
  space.Validate();
  std::mt19937_64 rng(seed);
  return DecodePoint(space, RandomPoint(space, rng));
}

TuneResult Tune(const HyperparamSpace& space, const Objective& objective,
                size_t budget, uint64_t seed, const TunerOptions& options) {
  space.Validate();
  if (budget == 0) throw Error(ErrorCode::kInvalidArgument, "budget must be >= 1");
  if (!(options.gamma > 0.0 && options.gamma < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gamma must be in (0, 1)");
  }
  const size_t n_startup = options.random_only
                               ? budget
                               : options.n_startup.value_or(std::max<size_t>(10, budget / 10));
  std::mt19937_64 rng(seed);
  TuneResult result;
  std::vector<Point> points;
  for (size_t t = 0; t < budget; ++t) {
    Point raw = t < std::max<size_t>(1, n_startup)
                    ? RandomPoint(space, rng)
                    : Propose(space, points, result.trials, options, rng);
    TrialRecord rec;
    rec.trial_index = t;
    rec.params = DecodePoint(space, raw);
    // The surrogate models the decoded value, so integers snap to buckets.
    Point p(space.dims.size());
    for (size_t d = 0; d < space.dims.size(); ++d) {
      p[d] = Encode(space.dims[d].domain, rec.params.at(space.dims[d].name));
    }
    points.push_back(std::move(p));
    const auto start = std::chrono::steady_clock::now();
    try {
      rec.cv_scores = objective(rec.params);
      if (rec.cv_scores.empty()) {
        rec.failed = true;
        rec.note = "no scored folds";
      }
      for (double s : rec.cv_scores) {
        if (!std::isfinite(s)) {
          rec.failed = true;
          rec.note = "non-finite score";
        }
      }
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.note = e.what();
      rec.cv_scores.clear();
    }
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (rec.failed) {
      rec.mean_score = kFailed;
    } else {
      double sum = 0.0;
      for (double s : rec.cv_scores) sum += s;
      rec.mean_score = sum / static_cast<double>(rec.cv_scores.size());
    }
    result.trials.push_back(std::move(rec));
  }
  const TrialRecord* best = nullptr;
  for (const auto& t : result.trials) {
    if (t.failed) continue;
    if (best == nullptr || t.mean_score > best->mean_score) best = &t;
  }
  if (best == nullptr) {
    throw Error(ErrorCode::kAllTrialsFailed,
                std::to_string(budget) + " trials failed; last: " + result.trials.back().note);
  }
  result.best = *best;
  return result;
}

TuneResult TunePipeline(const HyperparamSpace& space, TaskType task,
                        const FeatureTable& table, const Eigen::VectorXd& y,
                        size_t budget, size_t k, const std::string& metric,
                        uint64_t seed, size_t jobs, const TunerOptions& options) {
  Objective objective = [&](const ParamMap& params) {
    return CrossValidate(PipelineSpec{task, params}, table, y, k, metric, seed, jobs).scores;
  };
  return Tune(space, objective, budget, seed, options);
}

void WriteTrialLog(const std::filesystem::path& path, const HyperparamSpace& space,
                   const std::vector<TrialRecord>& trials) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  size_t folds = 0;
  for (const auto& t : trials) folds = std::max(folds, t.cv_scores.size());
  std::vector<std::string> row = {"trial"};
  for (const auto& d : space.dims) row.push_back(d.name);
  for (size_t f = 0; f < folds; ++f) row.push_back("fold_" + std::to_string(f + 1));
  row.push_back("mean");
  WriteCsvRow(out, row);
  for (const auto& t : trials) {
    row.clear();
    row.push_back(std::to_string(t.trial_index));
    for (const auto& d : space.dims) {
      auto it = t.params.find(d.name);
      row.push_back(it == t.params.end() ? "" : ParamToString(it->second));
    }
    for (size_t f = 0; f < folds; ++f) {
      row.push_back(f < t.cv_scores.size() ? FormatDouble(t.cv_scores[f]) : "");
    }
    row.push_back(t.failed ? "-inf" : FormatDouble(t.mean_score));
    WriteCsvRow(out, row);
  }
}

}  // namespace ehrflow::automl
