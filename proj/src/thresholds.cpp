#include "corrscreen/thresholds.hpp"

#include <cmath>
#include <string>

#include "corrscreen/errors.hpp"
#include "corrscreen/io.hpp"
#include "corrscreen/rng.hpp"
#include "corrscreen/synthesis.hpp"

namespace corrscreen {

namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw UsageError("alpha must lie in [0, 1), got " + std::to_string(alpha));
  }
}

void check_null(const EmpiricalDistribution& null) {
  if (null.signedness() != Signedness::Absolute) {
    throw UsageError("threshold rules expect a null distribution of absolute correlations");
  }
}

}  // namespace

std::string ThresholdMethod::label() const {
  switch (kind) {
    case ThresholdKind::Fwer: return "fwer(" + format_double(alpha) + ")";
    case ThresholdKind::Quantile: return "quantile(" + format_double(alpha) + ")";
    case ThresholdKind::Poli: return "poli";
    case ThresholdKind::Hero: return "hero";
  }
  return "?";
}

ThresholdMethod make_threshold_method(std::string_view name, std::optional<double> alpha) {
  ThresholdMethod method;
  if (name == "quantile") {
    method.kind = ThresholdKind::Quantile;
  } else if (name == "fwer") {
    method.kind = ThresholdKind::Fwer;
  } else if (name == "poli") {
    method.kind = ThresholdKind::Poli;
  } else if (name == "hero") {
    method.kind = ThresholdKind::Hero;
  } else {
    throw UsageError("unknown threshold method '" + std::string(name) + "' (quantile|fwer|poli|hero)");
  }
  if (method.uses_alpha()) {
    if (!alpha) throw UsageError("method '" + std::string(name) + "' requires --alpha");
    check_alpha(*alpha);
    method.alpha = *alpha;
  } else if (alpha) {
    throw UsageError("method '" + std::string(name) + "' takes no alpha");
  }
  return method;
}

ThresholdMethod parse_threshold_method(std::string_view text) {
  std::string_view name = text;
  std::optional<double> alpha;
  if (const auto open = text.find('('); open != std::string_view::npos) {
    if (text.back() != ')') throw UsageError("malformed method '" + std::string(text) + "'");
    name = text.substr(0, open);
    alpha = parse_double(text.substr(open + 1, text.size() - open - 2), "method alpha");
  } else if (const auto colon = text.find(':'); colon != std::string_view::npos) {
    name = text.substr(0, colon);
    alpha = parse_double(text.substr(colon + 1), "method alpha");
  }
  return make_threshold_method(name, alpha);
}

double threshold_quantile(const EmpiricalDistribution& null, double alpha) {
  check_alpha(alpha);
  check_null(null);
  return null.quantile(1.0 - alpha);
}

// Expected null discoveries at a stored value v are p_a p_b * #{x > v} / N,
// a step function that only changes at stored values.
double threshold_fwer(const EmpiricalDistribution& null, double alpha, Index p_a, Index p_b) {
  check_alpha(alpha);
  check_null(null);
  if (p_a < 1 || p_b < 1) throw UsageError("threshold_fwer needs p_a, p_b >= 1");
  const double budget = -std::log1p(-alpha);
  const double scale = static_cast<double>(p_a) * static_cast<double>(p_b) /
                       static_cast<double>(null.count());
  const auto values = null.values();
  // Binary search for the first index whose strict-exceedance count meets the
  // budget; the count is non-increasing in the index.
  std::size_t lo = 0;
  std::size_t hi = values.size() - 1;
  auto fits = [&](std::size_t k) {
    return scale * static_cast<double>(null.count_above(values[k])) <= budget;
  };
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (fits(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return values[lo];
}

double threshold_poli(const EmpiricalDistribution& null) {
  check_null(null);
  if (null.count() < 2) throw UsageError("threshold_poli needs at least two null values");
  return null.mean() + null.stddev();
}

double threshold_hero(Index n, Index p_a, Index p_b) {
  if (n < kMinSamples) throw UsageError("threshold_hero needs n >= 5");
  if (p_a < 1 || p_b < 1) throw UsageError("threshold_hero needs p_a, p_b >= 1");
  const double pairs = static_cast<double>(p_a) * static_cast<double>(p_b);
  auto excess = [&](double rho) { return pairs * null_abs_correlation_sf(rho, n) - 1.0; };
  double lo = 0.0;
  double hi = 1.0;
  if (excess(lo) <= 0.0) return 0.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double threshold_from_null(const ThresholdMethod& method, const EmpiricalDistribution* null, Index n,
                           Index p_a, Index p_b) {
  if (method.kind == ThresholdKind::Hero) return threshold_hero(n, p_a, p_b);
  if (null == nullptr) throw UsageError("method " + method.label() + " needs a surrogate null");
  switch (method.kind) {
    case ThresholdKind::Fwer: return threshold_fwer(*null, method.alpha, p_a, p_b);
    case ThresholdKind::Quantile: return threshold_quantile(*null, method.alpha);
    case ThresholdKind::Poli: return threshold_poli(*null);
    case ThresholdKind::Hero: break;
  }
  return threshold_hero(n, p_a, p_b);
}

EmpiricalDistribution pair_surrogate(const RegionTimeSeries& a, double intra_a,
                                     const RegionTimeSeries& b, double intra_b, int surrogate_reps,
                                     std::uint64_t seed) {
  if (a.samples() != b.samples()) {
    throw UsageError("regions '" + a.region_id + "' and '" + b.region_id +
                     "' have different sample counts");
  }
  const RegionPair pair = RegionPair::make(a.region_id, b.region_id);
  const bool swapped = pair.a != a.region_id;
  SurrogateSpec spec;
  spec.p_a = swapped ? b.voxels() : a.voxels();
  spec.p_b = swapped ? a.voxels() : b.voxels();
  spec.intra_a = swapped ? intra_b : intra_a;
  spec.intra_b = swapped ? intra_a : intra_b;
  spec.n = a.samples();
  spec.reps = surrogate_reps;
  spec.seed = derive_key(seed, {hash_string(pair.a), hash_string(pair.b)});
  return generate_surrogate(spec);
}

EmpiricalDistribution pair_surrogate(const RegionTimeSeries& a, const RegionTimeSeries& b,
                                     int surrogate_reps, std::uint64_t seed) {
  return pair_surrogate(a, average_intra(a).value, b, average_intra(b).value, surrogate_reps, seed);
}

double thresholds_for_pair(const RegionTimeSeries& a, const RegionTimeSeries& b,
                           const ThresholdMethod& method, int surrogate_reps, std::uint64_t seed) {
  if (a.samples() != b.samples()) {
    throw UsageError("regions '" + a.region_id + "' and '" + b.region_id +
                     "' have different sample counts");
  }
  if (!method.uses_surrogate()) return threshold_hero(a.samples(), a.voxels(), b.voxels());
  const auto null = pair_surrogate(a, b, surrogate_reps, seed);
  return threshold_from_null(method, &null, a.samples(), a.voxels(), b.voxels());
}

}  // namespace corrscreen
