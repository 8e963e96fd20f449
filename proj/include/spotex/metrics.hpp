#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spotex/fingerprint.hpp"

namespace spotex {

enum class Metric { euclidean, tanimoto };

std::string_view to_string(Metric metric) noexcept;
/// Accepts "euclidean" or "tanimoto"; throws Error(unknown_metric) otherwise.
Metric parse_metric(std::string_view name);

struct DistanceResult {
  double value = 0.0;  // dB for euclidean, unitless for tanimoto
  Metric metric = Metric::euclidean;
};

/// L2 norm of the difference of the two vectors after -100 dBm alignment.
DistanceResult euclidean_distance(const SignalVector& a, const SignalVector& b);

/// 1 - a.b / (|a|^2 + |b|^2 - a.b) over the -100 dBm aligned vectors.
/// Throws Error(undefined_tanimoto) when both aligned vectors are zero.
DistanceResult tanimoto_distance(const SignalVector& a, const SignalVector& b);

DistanceResult distance(const SignalVector& a, const SignalVector& b, Metric metric);

/// Strength order of a signal vector: rank 1 is the strongest AP, ties share
/// the mean of the ranks they span.
struct Ranking {
  std::map<MacAddress, double> ranks;

  friend bool operator==(const Ranking&, const Ranking&) = default;
};

Ranking rank_transform(const SignalVector& v);

/// Pearson correlation of the two rank sequences (exact under ties).
/// Throws Error(incomparable_rankings) when the mac sets differ and
/// Error(degenerate) when n < 2 or a ranking has no spread.
double spearman_correlation(const Ranking& a, const Ranking& b);

/// Spearman correlation of two signal vectors over their -100 dBm aligned union.
double aligned_rank_correlation(const SignalVector& a, const SignalVector& b);

struct LabeledVector {
  std::string label;
  SignalVector vector;
};

struct Neighbor {
  std::string label;
  DistanceResult distance;
};

/// The k entries of `db` closest to the query scan, ascending by distance
/// with ties broken by label. Throws Error(invalid_argument) for k == 0.
std::vector<Neighbor> knn_neighbors(const Fingerprint& query, std::span<const LabeledVector> db, std::size_t k,
                                    Metric metric);

}  // namespace spotex
