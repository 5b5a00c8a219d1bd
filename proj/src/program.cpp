#include "plankforge/program.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "plankforge/errors.hpp"

namespace plankforge {

Cuboid Cuboid::literal(const Box& b) {
  Cuboid c;
  const auto v = b.dofs();
  for (int d = 0; d < kDofCount; ++d) c.coords[d] = Literal{v[d]};
  return c;
}

bool structurally_equal(const Program& a, const Program& b, double tol) {
  if (a.cuboids.size() != b.cuboids.size()) return false;
  for (std::size_t i = 0; i < a.cuboids.size(); ++i) {
    for (int d = 0; d < kDofCount; ++d) {
      const CoordRef& ca = a.cuboids[i].coords[d];
      const CoordRef& cb = b.cuboids[i].coords[d];
      if (ca.index() != cb.index()) return false;
      if (const auto* la = std::get_if<Literal>(&ca)) {
        if (std::abs(la->value - std::get<Literal>(cb).value) > tol) return false;
      } else if (std::get<Attach>(ca) != std::get<Attach>(cb)) {
        return false;
      }
    }
  }
  return true;
}

bool attachment_legal(Dof from, int target_plank, Dof target_dof) {
  if (target_plank == 0) return target_dof == from;
  return target_dof == opposite(from);
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class LineParser {
 public:
  LineParser(std::string_view line, int line_no) : s_(line), line_no_(line_no) {}

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool at_end_or_comment() {
    skip_ws();
    return pos_ >= s_.size() || s_[pos_] == '#';
  }
  int column() const { return static_cast<int>(pos_) + 1; }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_no_, column()); }
  [[noreturn]] void fail_at(const std::string& what, int col) const {
    throw ParseError(what, line_no_, col);
  }

  std::string_view ident() {
    skip_ws();
    if (pos_ >= s_.size() || !is_ident_start(s_[pos_])) fail("syntax error: expected identifier");
    const std::size_t start = pos_;
    while (pos_ < s_.size() && is_ident_char(s_[pos_])) ++pos_;
    return s_.substr(start, pos_ - start);
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("syntax error: expected '") + c + "'");
    ++pos_;
  }

  bool peek_number() {
    skip_ws();
    if (pos_ >= s_.size()) return false;
    const char c = s_[pos_];
    return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.';
  }

  double number() {
    skip_ws();
    std::size_t start = pos_;
    if (s_[pos_] == '+') ++start, ++pos_;
    std::size_t end = pos_;
    while (end < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[end])) ||
                               s_[end] == '.' || s_[end] == '-' || s_[end] == '+' ||
                               s_[end] == 'e' || s_[end] == 'E')) {
      ++end;
    }
    double v = 0.0;
    const auto res = std::from_chars(s_.data() + start, s_.data() + end, v);
    if (res.ec != std::errc() || res.ptr != s_.data() + end) fail("syntax error: bad number");
    pos_ = end;
    return v;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  int line_no_;
};

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = nl + 1;
  }
  return lines;
}

// "# scale_mm_per_unit = 1200" carries model scale through .plank files.
void read_scale_comment(std::string_view line, Program& prog) {
  constexpr std::string_view key = "scale_mm_per_unit";
  const std::size_t hash = line.find('#');
  if (hash == std::string_view::npos) return;
  const std::size_t at = line.find(key, hash);
  if (at == std::string_view::npos) return;
  std::string_view rest = line.substr(at + key.size());
  while (!rest.empty() && (std::isspace(static_cast<unsigned char>(rest.front())) ||
                           rest.front() == '=' || rest.front() == ':')) {
    rest.remove_prefix(1);
  }
  double v = 0.0;
  const auto res = std::from_chars(rest.data(), rest.data() + rest.size(), v);
  if (res.ec == std::errc() && v > 0.0) prog.scale_mm_per_unit = v;
}

}  // namespace

Program parse_program(std::string_view text) {
  const auto lines = split_lines(text);

  // Names defined anywhere, to tell forward references from unknown ones.
  std::map<std::string, int, std::less<>> defined_later;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    LineParser lp(lines[i], static_cast<int>(i) + 1);
    if (lp.at_end_or_comment()) continue;
    try {
      defined_later.emplace(std::string(lp.ident()), static_cast<int>(i));
    } catch (const ParseError&) {
      // reported by the main pass
    }
  }

  Program prog;
  std::map<std::string, int, std::less<>> names;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    LineParser lp(lines[i], line_no);
    if (lp.at_end_or_comment()) {
      read_scale_comment(lines[i], prog);
      continue;
    }

    const int name_col = lp.column();
    const std::string name(lp.ident());
    lp.expect('=');
    const int kw_col = (lp.skip_ws(), lp.column());
    if (lp.ident() != "Cuboid") lp.fail_at("syntax error: expected 'Cuboid'", kw_col);
    lp.expect('(');

    Cuboid cub;
    for (int d = 0; d < kDofCount; ++d) {
      if (d > 0) lp.expect(',');
      if (lp.peek_number()) {
        cub.coords[d] = Literal{lp.number()};
        continue;
      }
      lp.skip_ws();
      const int ref_col = lp.column();
      const std::string_view ref = lp.ident();
      const std::size_t us = ref.rfind('_');
      if (us == std::string_view::npos || us + 1 >= ref.size() ||
          !std::all_of(ref.begin() + static_cast<long>(us) + 1, ref.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        lp.fail_at("syntax error: reference must be written name_k", ref_col);
      }
      const std::string_view target = ref.substr(0, us);
      int sub = 0;
      std::from_chars(ref.data() + us + 1, ref.data() + ref.size(), sub);
      auto it = names.find(target);
      if (it == names.end()) {
        if (defined_later.contains(target) || target == name) {
          lp.fail_at("forward reference '" + std::string(target) + "'", ref_col);
        }
        lp.fail_at("unknown identifier '" + std::string(target) + "'", ref_col);
      }
      if (sub < 1 || sub > 6) {
        lp.fail_at("subscript " + std::to_string(sub) + " outside 1..6", ref_col);
      }
      cub.coords[d] = Attach{it->second, static_cast<Dof>(sub - 1)};
    }
    lp.expect(')');
    if (!lp.at_end_or_comment()) lp.fail("syntax error: trailing characters");

    if (prog.cuboids.empty() && name != "bbox") {
      lp.fail_at("first statement must define 'bbox'", name_col);
    }
    if (names.contains(name)) lp.fail_at("duplicate name '" + name + "'", name_col);
    names.emplace(name, static_cast<int>(prog.cuboids.size()));
    prog.cuboids.push_back(cub);
  }
  return prog;
}

std::string print_program(const Program& p) {
  std::ostringstream out;
  char buf[64];
  for (std::size_t i = 0; i < p.cuboids.size(); ++i) {
    out << (i == 0 ? std::string("bbox") : "plank" + std::to_string(i)) << " = Cuboid(";
    for (int d = 0; d < kDofCount; ++d) {
      if (d > 0) out << ", ";
      const CoordRef& c = p.cuboids[i].coords[d];
      if (const auto* lit = std::get_if<Literal>(&c)) {
        // avoid printing "-0.000000"
        const double v = std::abs(lit->value) < 5e-7 ? 0.0 : lit->value;
        std::snprintf(buf, sizeof buf, "%.6f", v);
        out << buf;
      } else {
        const auto& a = std::get<Attach>(c);
        out << (a.plank == 0 ? std::string("bbox") : "plank" + std::to_string(a.plank)) << '_'
            << index_of(a.dof) + 1;
      }
    }
    out << ")\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Execution

std::vector<Box> resolve(const Program& p, bool include_bbox) {
  std::vector<std::array<double, 6>> values(p.cuboids.size());
  for (std::size_t i = 0; i < p.cuboids.size(); ++i) {
    for (int d = 0; d < kDofCount; ++d) {
      const CoordRef& c = p.cuboids[i].coords[d];
      if (const auto* lit = std::get_if<Literal>(&c)) {
        values[i][d] = lit->value;
      } else {
        const auto& a = std::get<Attach>(c);
        if (a.plank < 0 || static_cast<std::size_t>(a.plank) >= i) {
          throw Error("cuboid " + std::to_string(i) + " references cuboid " +
                      std::to_string(a.plank) + " which is not earlier");
        }
        values[i][d] = values[a.plank][index_of(a.dof)];
      }
    }
    if (!Box::from_dofs(values[i]).has_positive_volume()) throw ZeroVolumeError(static_cast<int>(i));
  }
  std::vector<Box> out;
  out.reserve(values.size());
  for (std::size_t i = include_bbox ? 0 : 1; i < values.size(); ++i) {
    out.push_back(Box::from_dofs(values[i]));
  }
  return out;
}

std::vector<Diagnostic> validate(const Program& p) {
  std::vector<Diagnostic> diags;
  auto report = [&](int plank, int dof, std::string code, std::string msg) {
    diags.push_back({plank, dof, std::move(code), std::move(msg)});
  };
  if (!p.has_bbox()) {
    report(-1, -1, "missing bbox", "program has no bounding box");
    return diags;
  }

  std::vector<std::array<double, 6>> values(p.cuboids.size());
  std::vector<bool> usable(p.cuboids.size(), true);
  for (std::size_t i = 0; i < p.cuboids.size(); ++i) {
    const int pi = static_cast<int>(i);
    for (int d = 0; d < kDofCount; ++d) {
      const Dof dof = static_cast<Dof>(d);
      const CoordRef& c = p.cuboids[i].coords[d];
      if (const auto* lit = std::get_if<Literal>(&c)) {
        values[i][d] = lit->value;
        if (!std::isfinite(lit->value)) report(pi, d, "non-finite", "literal is not finite");
        continue;
      }
      const auto& a = std::get<Attach>(c);
      values[i][d] = std::nan("");
      if (i == 0) {
        report(pi, d, "bbox attachment", "bbox coordinates must be literals");
        usable[i] = false;
        continue;
      }
      if (a.plank < 0 || a.plank >= pi) {
        report(pi, d, a.plank == pi ? "self-reference" : "forward reference",
               "reference to cuboid " + std::to_string(a.plank) + " is not backward");
        usable[i] = false;
        continue;
      }
      values[i][d] = values[a.plank][index_of(a.dof)];
      if (!usable[a.plank]) usable[i] = false;
      if (axis_of(a.dof) != axis_of(dof)) {
        report(pi, d, "cross-axis attachment",
               std::string(dof_name(dof)) + " attached to " + std::string(dof_name(a.dof)));
      } else if (!attachment_legal(dof, a.plank, a.dof)) {
        if (a.plank == 0) {
          report(pi, d, "bbox side mismatch",
                 std::string(dof_name(dof)) + " attached to bbox " + std::string(dof_name(a.dof)));
        } else {
          report(pi, d, "same-side attachment",
                 std::string(dof_name(dof)) + " attached to " + std::string(dof_name(a.dof)) +
                     " of plank " + std::to_string(a.plank));
        }
      }
    }
    if (usable[i] && !Box::from_dofs(values[i]).has_positive_volume()) {
      report(pi, -1, "zero volume", "cuboid " + std::to_string(i) + " has min >= max");
    }
  }
  return diags;
}

std::vector<Box> edit_propagate(const Program& p, int plank, Dof dof, double new_value) {
  if (plank < 0 || static_cast<std::size_t>(plank) >= p.cuboids.size()) {
    throw Error("edit target " + std::to_string(plank) + " out of range");
  }
  if (!p.cuboids[plank].is_literal(dof)) throw EditOnAttachmentError(plank, index_of(dof));
  Program edited = p;
  edited.cuboids[plank].coords[index_of(dof)] = Literal{new_value};
  return resolve(edited);
}

// ---------------------------------------------------------------------------
// Graph form

bool AttachmentGraph::adjacent(int from, int to) const {
  return std::binary_search(edges.begin(), edges.end(), std::pair{from, to});
}

AttachmentGraph to_graph(const Program& p) {
  AttachmentGraph g;
  g.face_count = p.cuboids.size() * kDofCount;
  for (std::size_t i = 0; i < p.cuboids.size(); ++i) {
    for (int d = 0; d < kDofCount; ++d) {
      if (const auto* a = std::get_if<Attach>(&p.cuboids[i].coords[d])) {
        g.edges.emplace_back(static_cast<int>(i) * kDofCount + d,
                             a->plank * kDofCount + index_of(a->dof));
      }
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

std::vector<double> face_values(const Program& p) {
  const auto boxes = resolve(p, true);
  std::vector<double> v;
  v.reserve(boxes.size() * kDofCount);
  for (const Box& b : boxes) {
    for (double x : b.dofs()) v.push_back(x);
  }
  return v;
}

Program from_graph(const AttachmentGraph& g, std::span<const double> values,
                   double scale_mm_per_unit) {
  if (g.face_count % kDofCount != 0) throw GraphError("face count is not a multiple of 6");
  if (values.size() < g.face_count) throw GraphError("value table shorter than face count");
  Program p;
  p.scale_mm_per_unit = scale_mm_per_unit;
  p.cuboids.resize(g.face_count / kDofCount);
  for (std::size_t f = 0; f < g.face_count; ++f) {
    p.cuboids[f / kDofCount].coords[f % kDofCount] = Literal{values[f]};
  }
  std::vector<int> out_degree(g.face_count, 0);
  for (const auto& [from, to] : g.edges) {
    if (from < 0 || to < 0 || static_cast<std::size_t>(from) >= g.face_count ||
        static_cast<std::size_t>(to) >= g.face_count) {
      throw GraphError("edge endpoint out of range");
    }
    if (++out_degree[from] > 1) {
      throw GraphError("face " + std::to_string(from) + " has out-degree > 1");
    }
    const int from_cub = from / kDofCount;
    const int to_cub = to / kDofCount;
    if (to_cub >= from_cub) {
      throw GraphError("edge " + std::to_string(from) + "->" + std::to_string(to) +
                       " is not backward");
    }
    p.cuboids[from_cub].coords[from % kDofCount] = Attach{to_cub, static_cast<Dof>(to % kDofCount)};
  }
  return p;
}

Program permute(const Program& p, std::span<const int> order) {
  if (order.size() != p.cuboids.size()) throw Error("permutation size mismatch");
  std::vector<int> new_index(order.size(), -1);
  for (std::size_t k = 0; k < order.size(); ++k) new_index[order[k]] = static_cast<int>(k);
  Program out;
  out.scale_mm_per_unit = p.scale_mm_per_unit;
  out.cuboids.reserve(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    Cuboid c = p.cuboids[order[k]];
    for (auto& coord : c.coords) {
      if (auto* a = std::get_if<Attach>(&coord)) {
        a->plank = new_index[a->plank];
        if (a->plank >= static_cast<int>(k)) throw Error("permutation breaks backward references");
      }
    }
    out.cuboids.push_back(c);
  }
  return out;
}

}  // namespace plankforge
