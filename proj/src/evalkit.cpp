#include "plankforge/evalkit.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace plankforge {

double iou(const Box& a, const Box& b) {
  const double inter = intersection_volume(a, b);
  const double uni = a.volume() + b.volume() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weights) {
  const int rows = static_cast<int>(weights.size());
  if (rows == 0) return {};
  const int cols = static_cast<int>(weights[0].size());
  const int n = std::max(rows, cols);
  if (cols == 0) return std::vector<int>(rows, -1);

  // Shortest augmenting path Hungarian on cost = -weight, 1-based potentials.
  constexpr double inf = std::numeric_limits<double>::infinity();
  auto cost = [&](int i, int j) {
    return (i < rows && j < cols) ? -weights[i][j] : 0.0;
  };
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match_col(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match_col[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = match_col[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match_col[j0] != 0);
    do {
      const int j1 = way[j0];
      match_col[j0] = match_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> assignment(rows, -1);
  for (int j = 1; j <= n; ++j) {
    const int i = match_col[j] - 1;
    if (i >= 0 && i < rows && j - 1 < cols) assignment[i] = j - 1;
  }
  return assignment;
}

std::vector<MatchPair> match_planks(std::span<const Box> pred, std::span<const Box> gt,
                                    double threshold) {
  if (pred.empty() || gt.empty()) return {};
  std::vector<std::vector<double>> w(pred.size(), std::vector<double>(gt.size()));
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (std::size_t j = 0; j < gt.size(); ++j) w[i][j] = iou(pred[i], gt[j]);
  }
  const auto assignment = max_weight_assignment(w);
  std::vector<MatchPair> pairs;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const int j = assignment[i];
    if (j >= 0 && w[i][j] > threshold) pairs.push_back({static_cast<int>(i), j, w[i][j]});
  }
  return pairs;
}

Prf prf(std::size_t tp, std::size_t n_pred, std::size_t n_gt) {
  Prf r;
  if (n_pred == 0 && n_gt == 0) return {1.0, 1.0, 1.0};
  r.precision = n_pred == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(n_pred);
  r.recall = n_gt == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(n_gt);
  const double s = r.precision + r.recall;
  r.f1 = s > 0.0 ? 2.0 * r.precision * r.recall / s : 0.0;
  return r;
}

ModelScore score_model(std::string id, std::span<const Box> pred, std::span<const Box> gt,
                       double threshold) {
  ModelScore m;
  m.id = std::move(id);
  m.n_pred = pred.size();
  m.n_gt = gt.size();
  m.pairs = match_planks(pred, gt, threshold);
  m.score = prf(m.pairs.size(), m.n_pred, m.n_gt);
  return m;
}

ModelScore failed_model(std::string id, std::size_t n_gt) {
  ModelScore m;
  m.id = std::move(id);
  m.failed = true;
  m.n_gt = n_gt;
  return m;
}

MatchReport aggregate(std::vector<ModelScore> models) {
  MatchReport r;
  r.models = std::move(models);
  if (r.models.empty()) return r;
  std::size_t tp = 0, np = 0, ng = 0;
  for (const auto& m : r.models) {
    r.macro.precision += m.score.precision;
    r.macro.recall += m.score.recall;
    r.macro.f1 += m.score.f1;
    tp += m.pairs.size();
    np += m.n_pred;
    ng += m.n_gt;
  }
  const double n = static_cast<double>(r.models.size());
  r.macro.precision /= n;
  r.macro.recall /= n;
  r.macro.f1 /= n;
  r.micro = prf(tp, np, ng);
  return r;
}

std::string report_to_json(const MatchReport& r) {
  using nlohmann::ordered_json;
  ordered_json models = ordered_json::array();
  for (const auto& m : r.models) {
    ordered_json pairs = ordered_json::array();
    for (const auto& p : m.pairs) pairs.push_back({p.pred, p.gt, p.iou});
    models.push_back({{"id", m.id},
                      {"failed", m.failed},
                      {"n_pred", m.n_pred},
                      {"n_gt", m.n_gt},
                      {"precision", m.score.precision},
                      {"recall", m.score.recall},
                      {"f1", m.score.f1},
                      {"pairs", pairs}});
  }
  auto prf_json = [](const Prf& p) {
    return ordered_json{{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
  };
  ordered_json j;
  j["macro"] = prf_json(r.macro);
  j["micro"] = prf_json(r.micro);
  j["models"] = models;
  return j.dump(2);
}

std::string report_table(const MatchReport& r) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-24s %9s %9s %9s\n", "model", "precision", "recall", "f1");
  out << buf;
  for (const auto& m : r.models) {
    std::snprintf(buf, sizeof buf, "%-24s %9.4f %9.4f %9.4f%s\n", m.id.c_str(), m.score.precision,
                  m.score.recall, m.score.f1, m.failed ? "  (failed)" : "");
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "%-24s %9.4f %9.4f %9.4f\n", "macro mean", r.macro.precision,
                r.macro.recall, r.macro.f1);
  out << buf;
  std::snprintf(buf, sizeof buf, "%-24s %9.4f %9.4f %9.4f\n", "micro", r.micro.precision,
                r.micro.recall, r.micro.f1);
  out << buf;
  return out.str();
}

}  // namespace plankforge
