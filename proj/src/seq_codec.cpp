#include "plankforge/seq_codec.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <tuple>

#include <json.hpp>

#include "plankforge/errors.hpp"

namespace plankforge {

int quantize(double x, bool* clamped) {
  const bool out_of_range = !(x >= -1.0 && x <= 1.0);
  if (clamped) *clamped = out_of_range;
  if (std::isnan(x)) return 0;
  const double c = std::clamp(x, -1.0, 1.0);
  return static_cast<int>(std::lround((c + 1.0) / 2.0 * (kNumBins - 1)));
}

double dequantize(int bin) {
  return static_cast<double>(bin) * 2.0 / static_cast<double>(kNumBins - 1) - 1.0;
}

// ---------------------------------------------------------------------------
// Input

std::vector<InputToken> encode_input(const DrawingSet& d) {
  std::vector<InputToken> tokens;
  for (View v : kViews) {
    using Quad = std::array<int, 4>;  // x1, x2, y1, y2 (sort key order)
    std::vector<std::pair<Quad, VisType>> edges;
    for (const Edge2D& e : d[v].edges) {
      int x1 = quantize(e.p1.x), y1 = quantize(e.p1.y);
      int x2 = quantize(e.p2.x), y2 = quantize(e.p2.y);
      if (std::tie(x2, y2) < std::tie(x1, y1)) {
        std::swap(x1, x2);
        std::swap(y1, y2);
      }
      edges.push_back({{x1, x2, y1, y2}, e.visible ? VisType::Visible : VisType::Hidden});
    }
    std::sort(edges.begin(), edges.end());
    const int view = static_cast<int>(v);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const auto& [q, vis] = edges[i];
      const std::array<int, 4> flat = {q[0], q[2], q[1], q[3]};  // x1, y1, x2, y2
      for (int c = 0; c < 4; ++c) {
        tokens.push_back({flat[c], view, static_cast<int>(i), c, vis});
      }
    }
  }
  return tokens;
}

// ---------------------------------------------------------------------------
// Output

std::vector<int> canonical_order(const Program& p) {
  const int n = static_cast<int>(p.cuboids.size());
  if (n == 0) return {};
  const auto boxes = resolve(p, true);

  std::vector<int> indegree(n, 0);
  std::vector<std::vector<int>> dependents(n);
  for (int i = 1; i < n; ++i) {
    std::set<int> targets;
    for (const auto& c : p.cuboids[i].coords) {
      if (const auto* a = std::get_if<Attach>(&c)) targets.insert(a->plank);
    }
    targets.erase(0);  // bbox always comes first
    indegree[i] = static_cast<int>(targets.size());
    for (int t : targets) dependents[t].push_back(i);
  }
  auto key_less = [&](int a, int b) {
    const auto ka = boxes[a].dofs(), kb = boxes[b].dofs();
    return std::tie(ka, a) < std::tie(kb, b);
  };
  std::set<int, decltype(key_less)> ready(key_less);
  for (int i = 1; i < n; ++i) {
    if (indegree[i] == 0) ready.insert(i);
  }
  std::vector<int> order{0};
  while (!ready.empty()) {
    const int u = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(u);
    for (int v : dependents[u]) {
      if (--indegree[v] == 0) ready.insert(v);
    }
  }
  if (static_cast<int>(order.size()) != n) throw Error("program has a reference cycle");
  return order;
}

Program canonicalize(const Program& p) { return permute(p, canonical_order(p)); }

std::vector<OutputToken> encode_output(const Program& p) {
  const Program c = canonicalize(p);
  std::vector<OutputToken> out;
  out.reserve(c.cuboids.size() * kDofCount + 2);
  out.push_back({TokenKind::Sos, 0, 0, 0});
  for (std::size_t i = 0; i < c.cuboids.size(); ++i) {
    for (int d = 0; d < kDofCount; ++d) {
      const CoordRef& ref = c.cuboids[i].coords[d];
      OutputToken t{TokenKind::Value, 0, static_cast<int>(i), d};
      if (const auto* lit = std::get_if<Literal>(&ref)) {
        t.arg = quantize(lit->value);
      } else {
        const auto& a = std::get<Attach>(ref);
        t.kind = TokenKind::Pointer;
        t.arg = dof_position(a.plank, index_of(a.dof));
      }
      out.push_back(t);
    }
  }
  out.push_back({TokenKind::Eos, 0, static_cast<int>(c.cuboids.size()), 0});
  return out;
}

DecodeResult decode_output(const std::vector<OutputToken>& tokens) {
  if (tokens.empty() || tokens.front().kind != TokenKind::Sos) {
    throw Error("output sequence must start with SOS");
  }
  DecodeResult res;
  std::size_t end = 1;
  while (end < tokens.size() && tokens[end].kind != TokenKind::Eos) {
    if (tokens[end].kind == TokenKind::Sos) throw Error("unexpected SOS inside output sequence");
    ++end;
  }
  const std::size_t dof_tokens = end - 1;
  const std::size_t n = dof_tokens / kDofCount;
  if (dof_tokens % kDofCount != 0) {
    res.diagnostics.push_back("dropped incomplete trailing plank (" +
                              std::to_string(dof_tokens % kDofCount) + " tokens)");
  }

  // Raw cuboids in sequence order, resolved on the fly.
  std::vector<Cuboid> raw(n);
  std::vector<std::array<double, 6>> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int d = 0; d < kDofCount; ++d) {
      const int pos = dof_position(static_cast<int>(i), d);
      const OutputToken& t = tokens[pos];
      if (t.kind == TokenKind::Value) {
        if (t.arg < 0 || t.arg >= kNumBins) throw Error("value bin out of range");
        raw[i].coords[d] = Literal{dequantize(t.arg)};
        values[i][d] = dequantize(t.arg);
        continue;
      }
      const int target = t.arg;
      if (target < 1 || target >= pos) throw MalformedPointerError(pos, target);
      const int tp = (target - 1) / kDofCount, td = (target - 1) % kDofCount;
      if (tp == static_cast<int>(i)) throw MalformedPointerError(pos, target);
      raw[i].coords[d] = Attach{tp, static_cast<Dof>(td)};
      values[i][d] = values[tp][td];
    }
  }

  std::vector<int> new_index(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (!Box::from_dofs(values[i]).has_positive_volume()) {
      res.diagnostics.push_back("dropped zero-volume cuboid at sequence index " + std::to_string(i));
      if (i == 0) {
        res.diagnostics.push_back("bounding box has zero volume; program discarded");
        res.program.cuboids.clear();
        return res;
      }
      continue;
    }
    Cuboid c = raw[i];
    for (int d = 0; d < kDofCount; ++d) {
      if (auto* a = std::get_if<Attach>(&c.coords[d])) {
        if (new_index[a->plank] < 0) {
          c.coords[d] = Literal{values[i][d]};
        } else {
          a->plank = new_index[a->plank];
        }
      }
    }
    new_index[i] = static_cast<int>(res.program.cuboids.size());
    res.program.cuboids.push_back(c);
  }
  res.bbox_present = res.program.has_bbox();
  if (!res.bbox_present) res.diagnostics.push_back("bounding box absent");
  return res;
}

PointerMask legal_pointer_mask(const std::vector<OutputToken>& prefix) {
  if (prefix.empty()) throw Error("prefix must start with SOS");
  const int t = static_cast<int>(prefix.size());
  const int plank = (t - 1) / kDofCount;
  const int face = (t - 1) % kDofCount;

  PointerMask m;
  m.vocab.assign(kVocabSize, true);
  m.vocab[kSosToken] = false;
  m.vocab[kEosToken] = face == 0;
  m.positions.assign(t, false);
  for (int p = 1; p < t; ++p) {
    if (prefix[p].kind == TokenKind::Sos || prefix[p].kind == TokenKind::Eos) continue;
    const int tp = (p - 1) / kDofCount, tf = (p - 1) % kDofCount;
    if (tp == plank) continue;
    m.positions[p] = axis_of(static_cast<Dof>(tf)) == axis_of(static_cast<Dof>(face)) &&
                     attachment_legal(static_cast<Dof>(face), tp, static_cast<Dof>(tf));
  }
  return m;
}

// ---------------------------------------------------------------------------
// JSONL

SequenceSample sample_from_jsonl(std::string_view line) {
  using nlohmann::json;
  try {
    const json j = json::parse(line);
    const int version = j.value("v", kSchemaVersion);
    if (version != kSchemaVersion) {
      throw Error("unsupported sequence schema version " + std::to_string(version));
    }
    SequenceSample s;
    s.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
    s.scale_mm_per_unit = j.at("scale").get<double>();
    for (const auto& r : j.at("input")) {
      s.input.push_back({r.at(0).get<int>(), r.at(1).get<int>(), r.at(2).get<int>(),
                         r.at(3).get<int>(), static_cast<VisType>(r.at(4).get<int>())});
    }
    for (const auto& r : j.at("output")) {
      const int kind = r.at(0).get<int>();
      if (kind < 0 || kind > 3) throw Error("unknown output token kind");
      s.output.push_back({static_cast<TokenKind>(kind), r.at(1).get<int>(), r.at(2).get<int>(),
                          r.at(3).get<int>()});
    }
    return s;
  } catch (const json::exception& e) {
    throw Error(std::string("sequence JSONL: ") + e.what());
  }
}

std::string sample_to_jsonl(const SequenceSample& s) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["v"] = kSchemaVersion;
  j["id"] = s.id;
  j["scale"] = s.scale_mm_per_unit;
  ordered_json in = ordered_json::array();
  for (const auto& t : s.input) {
    in.push_back({t.value_bin, t.view, t.edge_idx, t.coord_idx, static_cast<int>(t.vis_type)});
  }
  ordered_json out = ordered_json::array();
  for (const auto& t : s.output) {
    out.push_back({static_cast<int>(t.kind), t.arg, t.plank_idx, t.face_idx});
  }
  j["input"] = std::move(in);
  j["output"] = std::move(out);
  return j.dump();
}

}  // namespace plankforge
