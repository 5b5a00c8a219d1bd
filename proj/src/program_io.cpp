#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "plankforge/errors.hpp"
#include "plankforge/program.hpp"

namespace plankforge {

using nlohmann::json;

namespace {

json coord_to_json(const CoordRef& c) {
  if (const auto* lit = std::get_if<Literal>(&c)) return json{{"v", lit->value}};
  const auto& a = std::get<Attach>(c);
  return json{{"p", {a.plank, index_of(a.dof)}}};
}

CoordRef coord_from_json(const json& j) {
  if (j.contains("v")) return Literal{j.at("v").get<double>()};
  const auto& p = j.at("p");
  const int dof = p.at(1).get<int>();
  if (dof < 0 || dof >= kDofCount) throw Error("dof index out of range in program JSON");
  return Attach{p.at(0).get<int>(), static_cast<Dof>(dof)};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::string program_to_json(const Program& p) {
  json j;
  j["scale_mm_per_unit"] = p.scale_mm_per_unit;
  json bbox = json::array();
  if (p.has_bbox()) {
    for (const auto& c : p.cuboids[0].coords) bbox.push_back(std::get<Literal>(c).value);
  }
  j["bbox"] = bbox;
  json planks = json::array();
  for (std::size_t i = 1; i < p.cuboids.size(); ++i) {
    json row = json::array();
    for (const auto& c : p.cuboids[i].coords) row.push_back(coord_to_json(c));
    planks.push_back(row);
  }
  j["planks"] = planks;
  return j.dump();
}

Program program_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    Program p;
    p.scale_mm_per_unit = j.value("scale_mm_per_unit", 1000.0);
    const auto& bbox = j.at("bbox");
    if (bbox.empty()) return p;
    if (bbox.size() != kDofCount) throw Error("bbox must have 6 numbers");
    Cuboid b;
    for (int d = 0; d < kDofCount; ++d) b.coords[d] = Literal{bbox.at(d).get<double>()};
    p.cuboids.push_back(b);
    for (const auto& row : j.at("planks")) {
      if (row.size() != kDofCount) throw Error("plank must have 6 coordinates");
      Cuboid c;
      for (int d = 0; d < kDofCount; ++d) c.coords[d] = coord_from_json(row.at(d));
      p.cuboids.push_back(c);
    }
    return p;
  } catch (const json::exception& e) {
    throw Error(std::string("program JSON: ") + e.what());
  }
}

Program load_program(const std::string& path) {
  const std::string text = read_file(path);
  if (ends_with(path, ".json")) return program_from_json(text);
  return parse_program(text);
}

void save_program(const Program& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  if (ends_with(path, ".json")) {
    out << program_to_json(p) << '\n';
  } else {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", p.scale_mm_per_unit);
    out << "# scale_mm_per_unit = " << buf << '\n' << print_program(p);
  }
}

}  // namespace plankforge
