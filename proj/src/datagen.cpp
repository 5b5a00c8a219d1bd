#include "plankforge/datagen.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <mutex>
#include <optional>
#include <thread>

#include <json.hpp>

#include "plankforge/errors.hpp"

namespace plankforge {

namespace fs = std::filesystem;

void GenConfig::check() const {
  if (!(4 <= min_planks && min_planks <= max_planks && max_planks <= 20)) {
    throw Error("plank count range must satisfy 4 <= min <= max <= 20");
  }
  if (max_edges == 0) throw Error("max edges must be positive");
  for (const auto* r : {&width_mm, &depth_mm, &height_mm, &thickness_mm}) {
    if (!((*r)[0] > 0.0 && (*r)[0] <= (*r)[1])) throw Error("invalid millimeter range");
  }
  if (max_retries < 1) throw Error("max retries must be >= 1");
}

void SplitFractions::check() const {
  if (train < 0 || val < 0 || test < 0 || std::abs(train + val + test - 1.0) > 1e-9) {
    throw Error("split fractions must be non-negative and sum to 1");
  }
}

namespace {

// Everything below works in quantization bins so literals land exactly on
// values the codec can represent.
struct Builder {
  Program prog;
  std::vector<std::array<int, 6>> bins;  // resolved, per cuboid

  int add(const std::array<CoordRef, 6>& coords, const std::array<int, 6>& b) {
    Cuboid c;
    c.coords = coords;
    prog.cuboids.push_back(c);
    bins.push_back(b);
    return static_cast<int>(prog.cuboids.size()) - 1;
  }
};

CoordRef lit(int bin) { return Literal{dequantize(bin)}; }
CoordRef att(int plank, Dof d) { return Attach{plank, d}; }

struct Region {
  int x0, x1, z0, z1;
  Attach left, right, bottom, top;
};

int to_bins(double units) { return static_cast<int>(std::lround(units * (kNumBins - 1) / 2.0)); }

std::optional<Program> try_cabinet(Rng& rng, const GenConfig& c) {
  const double w = rng.uniform(c.width_mm[0], c.width_mm[1]);
  const double dpt = rng.uniform(c.depth_mm[0], c.depth_mm[1]);
  const double h = rng.uniform(c.height_mm[0], c.height_mm[1]);
  const double scale = std::max({w, dpt, h}) / 1.6;  // longest side spans [-0.8, 0.8]
  const int t = std::max(2, to_bins(rng.uniform(c.thickness_mm[0], c.thickness_mm[1]) / scale));
  const int gap = std::max(4, t + 1);

  const int mid = (kNumBins - 1) / 2;
  const int hx = to_bins(w / 2.0 / scale), hy = to_bins(dpt / 2.0 / scale), hz = to_bins(h / 2.0 / scale);
  const int X0 = mid - hx, X1 = mid + hx, Y0 = mid - hy, Y1 = mid + hy, Z0 = mid - hz, Z1 = mid + hz;
  if (X1 - X0 < 2 * t + gap || Z1 - Z0 < 2 * t + gap || Y1 - Y0 < 2 * t + gap) return std::nullopt;

  Builder b;
  b.prog.scale_mm_per_unit = scale;
  using D = Dof;
  b.add({lit(X0), lit(Y0), lit(Z0), lit(X1), lit(Y1), lit(Z1)}, {X0, Y0, Z0, X1, Y1, Z1});

  // Shell layout: the top covers the sides, the bottom sits between them and
  // the back stands proud of the carcass rear. Each panel then owns a drawn
  // edge that nothing else produces; without that an open compartment filled
  // with a solid draws exactly like the panels around it. No outline line may
  // run across another panel either, or phantom faces split that panel.
  const bool has_back = rng.bernoulli(c.back_prob);
  const int Yb = has_back ? Y1 - t : Y1;  // carcass depth
  const CoordRef rear = has_back ? lit(Yb) : att(0, D::YMax);
  const int top = b.add({att(0, D::XMin), att(0, D::YMin), lit(Z1 - t), att(0, D::XMax), rear, att(0, D::ZMax)},
                        {X0, Y0, Z1 - t, X1, Yb, Z1});
  const int left = b.add({att(0, D::XMin), att(0, D::YMin), att(0, D::ZMin), lit(X0 + t), rear, att(top, D::ZMin)},
                         {X0, Y0, Z0, X0 + t, Yb, Z1 - t});
  const int right = b.add({lit(X1 - t), att(0, D::YMin), att(0, D::ZMin), att(0, D::XMax), rear, att(top, D::ZMin)},
                          {X1 - t, Y0, Z0, X1, Yb, Z1 - t});
  const int bottom = b.add({att(left, D::XMax), att(0, D::YMin), att(0, D::ZMin), att(right, D::XMin), rear, lit(Z0 + t)},
                           {X0 + t, Y0, Z0, X1 - t, Yb, Z0 + t});
  CoordRef depth_ref = att(0, D::YMax);
  if (has_back) {
    const int back = b.add({att(left, D::XMax), att(left, D::YMax), att(bottom, D::ZMax), att(right, D::XMin), att(0, D::YMax), att(top, D::ZMin)},
                           {X0 + t, Yb, Z0 + t, X1 - t, Y1, Z1 - t});
    depth_ref = att(back, D::YMin);
  }

  const int target = static_cast<int>(rng.uniform_int(c.min_planks, c.max_planks));
  std::vector<Region> regions{{X0 + t, X1 - t, Z0 + t, Z1 - t, {left, D::XMax}, {right, D::XMin},
                               {bottom, D::ZMax}, {top, D::ZMin}}};

  auto can_shelf = [&](const Region& r) { return r.z1 - r.z0 >= 2 * gap + t; };
  auto can_divide = [&](const Region& r) { return r.x1 - r.x0 >= 2 * gap + t; };

  while (static_cast<int>(b.prog.plank_count()) < target) {
    std::vector<int> open;
    for (int i = 0; i < static_cast<int>(regions.size()); ++i) {
      if (can_shelf(regions[i]) || can_divide(regions[i])) open.push_back(i);
    }
    if (open.empty()) break;
    const int ri = open[rng.uniform_int(0, static_cast<std::int64_t>(open.size()) - 1)];
    const Region r = regions[ri];
    bool divider = rng.bernoulli(c.divider_prob);
    if (divider && !can_divide(r)) divider = false;
    if (!divider && !can_shelf(r)) divider = true;

    if (divider) {
      const int x = static_cast<int>(rng.uniform_int(r.x0 + gap, r.x1 - gap - t));
      const int p = b.add({lit(x), att(0, D::YMin), att(r.bottom.plank, r.bottom.dof), lit(x + t), depth_ref,
                           att(r.top.plank, r.top.dof)},
                          {x, Y0, r.z0, x + t, Yb, r.z1});
      regions[ri] = {r.x0, x, r.z0, r.z1, r.left, {p, D::XMin}, r.bottom, r.top};
      regions.push_back({x + t, r.x1, r.z0, r.z1, {p, D::XMax}, r.right, r.bottom, r.top});
    } else {
      const int z = static_cast<int>(rng.uniform_int(r.z0 + gap, r.z1 - gap - t));
      const int p = b.add({att(r.left.plank, r.left.dof), att(0, D::YMin), lit(z), att(r.right.plank, r.right.dof),
                           depth_ref, lit(z + t)},
                          {r.x0, Y0, z, r.x1, Yb, z + t});
      regions[ri] = {r.x0, r.x1, r.z0, z, r.left, r.right, r.bottom, {p, D::ZMin}};
      regions.push_back({r.x0, r.x1, z + t, r.z1, r.left, r.right, {p, D::ZMax}, r.top});
    }
  }

  const int n = static_cast<int>(b.prog.plank_count());
  if (n < c.min_planks || n > c.max_planks) return std::nullopt;
  if (!validate(b.prog).empty()) return std::nullopt;
  const auto boxes = resolve(b.prog);
  if (count_edges(project(boxes, scale)) > c.max_edges) return std::nullopt;
  return canonicalize(b.prog);
}

template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex m;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(m);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

Program gen_cabinet(Rng& rng, const GenConfig& c) {
  c.check();
  for (int attempt = 0; attempt < c.max_retries; ++attempt) {
    if (auto p = try_cabinet(rng, c)) return *p;
  }
  throw RetryExhaustedError("cabinet generation failed " + std::to_string(c.max_retries) +
                            " times in a row; loosen the filters");
}

std::vector<Program> generate_programs(std::size_t n, const GenConfig& c, int jobs) {
  c.check();
  std::vector<Program> out(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    Rng rng = Rng::derive(c.seed, i);
    out[i] = gen_cabinet(rng, c);
  });
  return out;
}

std::vector<DatasetSample> assemble_dataset(const std::vector<Program>& programs,
                                            const SplitFractions& splits, int jobs) {
  splits.check();
  std::vector<std::vector<OutputToken>> tokens(programs.size());
  parallel_for(programs.size(), jobs, [&](std::size_t i) { tokens[i] = encode_output(programs[i]); });

  auto key = [](const std::vector<OutputToken>& ts) {
    std::vector<int> k;
    k.reserve(ts.size() * 2);
    for (const auto& t : ts) {
      k.push_back(static_cast<int>(t.kind));
      k.push_back(t.arg);
    }
    return k;
  };
  std::set<std::vector<int>> seen;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < programs.size(); ++i) {
    if (seen.insert(key(tokens[i])).second) keep.push_back(i);
  }

  const std::size_t n = keep.size();
  const auto n_train = std::min<std::size_t>(n, std::llround(static_cast<double>(n) * splits.train));
  const auto n_val = std::min<std::size_t>(n - n_train, std::llround(static_cast<double>(n) * splits.val));

  std::vector<DatasetSample> out(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    DatasetSample& s = out[i];
    char id[32];
    std::snprintf(id, sizeof id, "%06zu", i);
    s.id = id;
    s.split = i < n_train ? "train" : i < n_train + n_val ? "val" : "test";
    s.program = canonicalize(programs[keep[i]]);
    s.drawing = project(resolve(s.program), s.program.scale_mm_per_unit);
    s.sequence.id = s.id;
    s.sequence.scale_mm_per_unit = s.program.scale_mm_per_unit;
    s.sequence.input = encode_input(s.drawing);
    s.sequence.output = tokens[keep[i]];
  });
  return out;
}

void write_dataset(const std::vector<DatasetSample>& samples, const std::string& dir) {
  std::map<std::string, std::ofstream> jsonl;
  for (const char* split : {"train", "val", "test"}) {
    fs::create_directories(fs::path(dir) / split);
    const auto path = fs::path(dir) / (std::string(split) + ".jsonl");
    jsonl[split].open(path, std::ios::binary);
    if (!jsonl[split]) throw Error("cannot write " + path.string());
  }
  for (const auto& s : samples) {
    const fs::path base = fs::path(dir) / s.split / s.id;
    save_program(s.program, base.string() + ".plank");
    save_drawing(s.drawing, base.string() + ".drawing.json");
    jsonl[s.split] << sample_to_jsonl(s.sequence) << '\n';
  }
  for (auto& [name, f] : jsonl) {
    f.flush();
    if (!f) throw Error("write failed for " + name + ".jsonl");
  }
}

DatasetStats dataset_stats(const std::vector<std::pair<Program, DrawingSet>>& items) {
  DatasetStats s;
  s.samples = items.size();
  if (items.empty()) return s;
  for (const auto& [p, d] : items) {
    const int planks = static_cast<int>(p.plank_count());
    const auto edges = count_edges(d);
    const double hf = hidden_fraction(d);
    ++s.planks[planks];
    ++s.edges[static_cast<int>(edges / 25) * 25];
    ++s.hidden_pct[std::min(90, static_cast<int>(hf * 100.0) / 10 * 10)];
    s.mean_planks += planks;
    s.mean_edges += static_cast<double>(edges);
    s.mean_hidden_fraction += hf;
  }
  const double n = static_cast<double>(items.size());
  s.mean_planks /= n;
  s.mean_edges /= n;
  s.mean_hidden_fraction /= n;
  return s;
}

DatasetStats dataset_stats(const std::string& dir) {
  std::vector<fs::path> planks;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".plank") planks.push_back(e.path());
  }
  std::sort(planks.begin(), planks.end());
  std::vector<std::pair<Program, DrawingSet>> items;
  for (const auto& p : planks) {
    const Program prog = load_program(p.string());
    fs::path drawing = p;
    drawing.replace_extension(".drawing.json");
    const DrawingSet d = fs::exists(drawing) ? load_drawing(drawing.string())
                                             : project(resolve(prog), prog.scale_mm_per_unit);
    items.emplace_back(prog, d);
  }
  return dataset_stats(items);
}

std::string stats_to_json(const DatasetStats& s) {
  nlohmann::ordered_json j;
  auto hist = [](const std::map<int, std::size_t>& m) {
    nlohmann::ordered_json h = nlohmann::ordered_json::object();
    for (const auto& [k, v] : m) h[std::to_string(k)] = v;
    return h;
  };
  j["samples"] = s.samples;
  j["mean_planks"] = s.mean_planks;
  j["mean_edges"] = s.mean_edges;
  j["mean_hidden_fraction"] = s.mean_hidden_fraction;
  j["planks"] = hist(s.planks);
  j["edges_bucket25"] = hist(s.edges);
  j["hidden_pct_bucket10"] = hist(s.hidden_pct);
  return j.dump(2);
}

std::string stats_table(const DatasetStats& s) {
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "samples %zu  mean planks %.2f  mean edges %.1f  mean hidden %.1f%%\n",
                s.samples, s.mean_planks, s.mean_edges, 100.0 * s.mean_hidden_fraction);
  out << buf;
  auto print = [&](const char* title, const std::map<int, std::size_t>& m, const char* fmt) {
    out << title << '\n';
    for (const auto& [k, v] : m) {
      std::snprintf(buf, sizeof buf, fmt, k, v);
      out << buf;
    }
  };
  print("planks", s.planks, "  %4d  %zu\n");
  print("edges (bucket of 25)", s.edges, "  %4d  %zu\n");
  print("hidden % (bucket of 10)", s.hidden_pct, "  %4d  %zu\n");
  return out.str();
}

}  // namespace plankforge
