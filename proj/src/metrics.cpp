#include "spotex/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spotex/error.hpp"

namespace spotex {

std::string_view to_string(Metric metric) noexcept {
  switch (metric) {
    case Metric::euclidean:
      return "euclidean";
    case Metric::tanimoto:
      return "tanimoto";
  }
  return "unknown";
}

Metric parse_metric(std::string_view name) {
  if (name == "euclidean") return Metric::euclidean;
  if (name == "tanimoto") return Metric::tanimoto;
  throw Error(ErrorCode::unknown_metric, "unknown metric '" + std::string(name) + "'");
}

DistanceResult euclidean_distance(const SignalVector& a, const SignalVector& b) {
  const auto aligned = align(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < aligned.a.size(); ++i) {
    const double d = aligned.a[i] - aligned.b[i];
    sum += d * d;
  }
  return {std::sqrt(sum), Metric::euclidean};
}

DistanceResult tanimoto_distance(const SignalVector& a, const SignalVector& b) {
  const auto aligned = align(a, b);
  double dot = 0.0;
  double norm_a = 0.0;
  double norm_b = 0.0;
  for (std::size_t i = 0; i < aligned.a.size(); ++i) {
    dot += aligned.a[i] * aligned.b[i];
    norm_a += aligned.a[i] * aligned.a[i];
    norm_b += aligned.b[i] * aligned.b[i];
  }
  const double denom = norm_a + norm_b - dot;
  if (denom == 0.0) throw Error(ErrorCode::undefined_tanimoto, "undefined Tanimoto");
  // Rounding can push an identical pair a hair below zero.
  return {std::max(0.0, 1.0 - dot / denom), Metric::tanimoto};
}

DistanceResult distance(const SignalVector& a, const SignalVector& b, Metric metric) {
  return metric == Metric::euclidean ? euclidean_distance(a, b) : tanimoto_distance(a, b);
}

Ranking rank_transform(const SignalVector& v) {
  std::vector<std::pair<MacAddress, double>> items(v.entries().begin(), v.entries().end());
  std::stable_sort(items.begin(), items.end(), [](const auto& l, const auto& r) { return l.second > r.second; });

  Ranking out;
  std::size_t i = 0;
  while (i < items.size()) {
    std::size_t j = i;
    while (j + 1 < items.size() && items[j + 1].second == items[i].second) ++j;
    // positions i..j (0-based) hold ranks i+1..j+1
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) out.ranks.emplace(items[k].first, rank);
    i = j + 1;
  }
  return out;
}

double spearman_correlation(const Ranking& a, const Ranking& b) {
  if (a.ranks.size() != b.ranks.size() ||
      !std::equal(a.ranks.begin(), a.ranks.end(), b.ranks.begin(),
                  [](const auto& l, const auto& r) { return l.first == r.first; })) {
    throw Error(ErrorCode::incomparable_rankings, "incomparable rankings");
  }
  const std::size_t n = a.ranks.size();
  if (n < 2) throw Error(ErrorCode::degenerate, "degenerate: spearman needs at least two ranked APs");

  std::vector<double> ra;
  std::vector<double> rb;
  ra.reserve(n);
  rb.reserve(n);
  for (const auto& entry : a.ranks) ra.push_back(entry.second);
  for (const auto& entry : b.ranks) rb.push_back(entry.second);

  const double mean_a = std::accumulate(ra.begin(), ra.end(), 0.0) / static_cast<double>(n);
  const double mean_b = std::accumulate(rb.begin(), rb.end(), 0.0) / static_cast<double>(n);
  double cov = 0.0;
  double var_a = 0.0;
  double var_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = ra[i] - mean_a;
    const double db = rb[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) throw Error(ErrorCode::degenerate, "degenerate: ranking without spread");
  return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

double aligned_rank_correlation(const SignalVector& a, const SignalVector& b) {
  const auto aligned = align(a, b);
  SignalVector::Entries ea;
  SignalVector::Entries eb;
  for (std::size_t i = 0; i < aligned.universe.size(); ++i) {
    ea.emplace(aligned.universe[i], aligned.a[i]);
    eb.emplace(aligned.universe[i], aligned.b[i]);
  }
  return spearman_correlation(rank_transform(SignalVector(std::move(ea))),
                              rank_transform(SignalVector(std::move(eb))));
}

std::vector<Neighbor> knn_neighbors(const Fingerprint& query, std::span<const LabeledVector> db, std::size_t k,
                                    Metric metric) {
  if (k == 0) throw Error(ErrorCode::invalid_argument, "k must be >= 1");
  const SignalVector q = average_vector(std::span<const Fingerprint>(&query, 1));

  std::vector<Neighbor> scored;
  scored.reserve(db.size());
  for (const auto& entry : db) scored.push_back({entry.label, distance(q, entry.vector, metric)});

  const auto closer = [](const Neighbor& l, const Neighbor& r) {
    if (l.distance.value != r.distance.value) return l.distance.value < r.distance.value;
    return l.label < r.label;
  };
  const std::size_t keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), closer);
  scored.resize(keep);
  return scored;
}

}  // namespace spotex
