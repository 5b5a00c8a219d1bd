#pragma once

#include <span>
#include <string>
#include <vector>

#include "plankforge/geometry.hpp"

namespace plankforge {

inline constexpr double kDefaultIouThreshold = 0.5;

/// Volume of intersection over volume of union, computed per axis.
double iou(const Box& a, const Box& b);

/// Maximum-weight assignment on a rectangular weight matrix (rows x cols).
/// Returns, for every row, the matched column or -1.
std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weights);

struct MatchPair {
  int pred = -1;
  int gt = -1;
  double iou = 0.0;
};

/// Maximum-IoU-sum bipartite matching; pairs with IoU <= threshold are
/// discarded afterwards. Remaining pairs are the true positives.
std::vector<MatchPair> match_planks(std::span<const Box> pred, std::span<const Box> gt,
                                    double threshold = kDefaultIouThreshold);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

Prf prf(std::size_t true_positives, std::size_t n_pred, std::size_t n_gt);

struct ModelScore {
  std::string id;
  bool failed = false;  ///< reconstruction produced nothing usable; scored as zeros
  std::size_t n_pred = 0;
  std::size_t n_gt = 0;
  std::vector<MatchPair> pairs;
  Prf score;
};

ModelScore score_model(std::string id, std::span<const Box> pred, std::span<const Box> gt,
                       double threshold = kDefaultIouThreshold);
ModelScore failed_model(std::string id, std::size_t n_gt);

struct MatchReport {
  std::vector<ModelScore> models;
  Prf macro;  ///< unweighted mean over models
  Prf micro;  ///< from pooled counts
};

MatchReport aggregate(std::vector<ModelScore> models);

std::string report_to_json(const MatchReport& r);
std::string report_table(const MatchReport& r);

}  // namespace plankforge
