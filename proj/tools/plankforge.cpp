#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "plankforge/datagen.hpp"
#include "plankforge/degrade.hpp"
#include "plankforge/errors.hpp"
#include "plankforge/evalkit.hpp"
#include "plankforge/program.hpp"
#include "plankforge/projector.hpp"
#include "plankforge/seq_codec.hpp"
#include "plankforge/wireframe.hpp"

namespace fs = std::filesystem;
using namespace plankforge;

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// stdout when path is empty or "-"
void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
  if (!out) throw Error("write failed for " + path);
}

std::uint64_t resolve_seed(std::uint64_t flag) {
  std::uint64_t seed = flag;
  if (const char* env = std::getenv("PLANKFORGE_SEED"); env && *env) {
    try {
      seed = std::stoull(env);
    } catch (const std::exception&) {
      throw Error(std::string("PLANKFORGE_SEED is not an unsigned integer: ") + env);
    }
  }
  std::cerr << "seed: " << seed << '\n';
  return seed;
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Program, solution or raw box list -> boxes (and recon status for solutions).
struct Prediction {
  std::vector<Box> boxes;
  std::optional<SolutionStatus> status;
};

Prediction load_prediction(const std::string& path) {
  if (ends_with(path, ".solution.json")) {
    auto [status, boxes] = solution_from_json(read_text(path));
    return {boxes, status};
  }
  return {resolve(load_program(path)), std::nullopt};
}

// id -> file, stripping the known suffixes
std::map<std::string, std::string> index_dir(const std::string& dir, bool predictions) {
  static const std::vector<std::string> gt_suffixes = {".plank", ".program.json"};
  static const std::vector<std::string> pred_suffixes = {".solution.json", ".plank", ".program.json"};
  const auto& suffixes = predictions ? pred_suffixes : gt_suffixes;
  if (!fs::is_directory(dir)) throw Error("not a directory: " + dir);
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string name = e.path().filename().string();
    for (const auto& s : suffixes) {
      if (ends_with(name, s)) {
        const std::string id = name.substr(0, name.size() - s.size());
        out.try_emplace(id, e.path().string());  // earlier suffix wins on clashes
        break;
      }
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"plankforge: cabinet shape programs, three-view drawings and reconstruction"};
  app.require_subcommand(1);
  app.fallthrough();  // --jobs may follow the subcommand
  int jobs = 1;
  app.add_option("--jobs", jobs, "worker threads for per-sample work")->check(CLI::PositiveNumber);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic cabinet dataset");
  std::size_t gen_n = 100;
  std::uint64_t gen_seed = 0;
  std::string gen_out = "dataset";
  std::vector<double> gen_splits = {0.8, 0.1, 0.1};
  GenConfig gen_cfg;
  gen->add_option("--n", gen_n, "number of cabinets before deduplication")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "run seed");
  gen->add_option("--out", gen_out, "output directory");
  gen->add_option("--splits", gen_splits, "train val test fractions")->expected(3)->delimiter(',');
  gen->add_option("--min-planks", gen_cfg.min_planks);
  gen->add_option("--max-planks", gen_cfg.max_planks);
  gen->add_option("--max-edges", gen_cfg.max_edges);
  gen->add_option("--back-prob", gen_cfg.back_prob);
  gen->add_option("--divider-prob", gen_cfg.divider_prob);

  // project
  auto* proj = app.add_subcommand("project", "three-view line drawing of a program");
  std::string proj_in, proj_out, proj_svg;
  proj->add_option("program", proj_in, ".plank or program .json")->required();
  proj->add_option("--out", proj_out, "drawing JSON path (default stdout)");
  proj->add_option("--svg", proj_svg, "also write an SVG rendering");

  // noise
  auto* noise = app.add_subcommand("noise", "perturb a drawing");
  std::string noise_in, noise_out;
  NoiseConfig noise_cfg;
  bool noise_visible_only = false;
  noise->add_option("drawing", noise_in)->required();
  noise->add_option("--out", noise_out);
  noise->add_option("--noise-ratio", noise_cfg.ratio)->check(CLI::Range(0.0, 1.0));
  noise->add_option("--delete-prob", noise_cfg.delete_prob)->check(CLI::Range(0.0, 1.0));
  noise->add_option("--max-shift-frac", noise_cfg.max_shift_frac)->check(CLI::NonNegativeNumber);
  noise->add_option("--seed", noise_cfg.seed);
  noise->add_flag("--visible-only", noise_visible_only, "drop hidden edges first");

  // encode
  auto* enc = app.add_subcommand("encode", "program (+ drawing) to one JSONL sequence sample");
  std::string enc_prog, enc_drawing, enc_id = "0", enc_out;
  enc->add_option("program", enc_prog)->required();
  enc->add_option("--drawing", enc_drawing, "input drawing (default: project the program)");
  enc->add_option("--id", enc_id);
  enc->add_option("--out", enc_out);

  // decode
  auto* dec = app.add_subcommand("decode", "JSONL sequence samples back to programs");
  std::string dec_in, dec_out;
  dec->add_option("jsonl", dec_in)->required();
  dec->add_option("--out", dec_out, "program file (single sample) or directory");

  // recon
  auto* rec = app.add_subcommand("recon", "reconstruct planks from a drawing");
  std::string rec_in, rec_out, rec_obj, rec_variant = "verify";
  double rec_timeout = 300.0;
  std::optional<std::uint64_t> rec_sample;
  rec->add_option("drawing", rec_in)->required();
  rec->add_option("--variant", rec_variant)->check(CLI::IsMember({"verify", "union"}));
  rec->add_option("--timeout-secs", rec_timeout)->check(CLI::PositiveNumber);
  rec->add_option("--sample-solution", rec_sample, "pick a random minimal solution with this seed");
  rec->add_option("--out", rec_out, "solution JSON path (default stdout)");
  rec->add_option("--obj", rec_obj, "also write the chosen blocks as OBJ");

  // eval
  auto* ev = app.add_subcommand("eval", "score predictions against ground truth");
  std::string ev_pred, ev_gt, ev_out;
  double ev_thresh = kDefaultIouThreshold;
  bool ev_no_group = false;
  ev->add_option("--pred", ev_pred)->required();
  ev->add_option("--gt", ev_gt)->required();
  ev->add_option("--iou-thresh", ev_thresh)->check(CLI::Range(0.0, 1.0));
  ev->add_option("--out", ev_out, "JSON report path (default stdout)");
  ev->add_flag("--no-group", ev_no_group, "score solution blocks without grouping by ground truth");

  // export
  auto* ex = app.add_subcommand("export", "OBJ or SVG export");
  std::string ex_in, ex_obj, ex_svg;
  ex->add_option("input", ex_in, "program, solution JSON or drawing JSON")->required();
  ex->add_option("--obj", ex_obj);
  ex->add_option("--svg", ex_svg);

  // stats
  auto* st = app.add_subcommand("stats", "dataset histograms");
  std::string st_dir, st_out;
  st->add_option("dataset", st_dir)->required();
  st->add_option("--out", st_out, "JSON path; the table always goes to stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  try {
    if (*gen) {
      gen_cfg.seed = resolve_seed(gen_seed);
      const SplitFractions sf{gen_splits[0], gen_splits[1], gen_splits[2]};
      sf.check();
      const auto programs = generate_programs(gen_n, gen_cfg, jobs);
      const auto samples = assemble_dataset(programs, sf, jobs);
      write_dataset(samples, gen_out);
      std::cerr << samples.size() << " samples written to " << gen_out << " ("
                << gen_n - samples.size() << " duplicates dropped)\n";
    } else if (*proj) {
      const Program p = load_program(proj_in);
      const DrawingSet d = project(resolve(p), p.scale_mm_per_unit);
      emit(drawing_to_json(d), proj_out);
      if (!proj_svg.empty()) emit(drawing_to_svg(d), proj_svg);
    } else if (*noise) {
      noise_cfg.seed = resolve_seed(noise_cfg.seed);
      DrawingSet d = load_drawing(noise_in);
      if (noise_visible_only) d = strip_hidden(d);
      NoiseReport rep;
      const DrawingSet out = inject_noise(d, noise_cfg, &rep);
      std::cerr << "selected " << rep.selected << ", deleted " << rep.deleted << ", perturbed "
                << rep.perturbed << ", degenerate " << rep.degenerate << '\n';
      emit(drawing_to_json(out), noise_out);
    } else if (*enc) {
      const Program p = load_program(enc_prog);
      const DrawingSet d = enc_drawing.empty() ? project(resolve(p), p.scale_mm_per_unit)
                                               : load_drawing(enc_drawing);
      SequenceSample s;
      s.id = enc_id;
      s.scale_mm_per_unit = p.scale_mm_per_unit;
      s.input = encode_input(d);
      s.output = encode_output(p);
      emit(sample_to_jsonl(s), enc_out);
    } else if (*dec) {
      std::istringstream lines(read_text(dec_in));
      std::vector<SequenceSample> samples;
      for (std::string line; std::getline(lines, line);) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) samples.push_back(sample_from_jsonl(line));
      }
      const bool to_file = samples.size() == 1 && (ends_with(dec_out, ".plank") || ends_with(dec_out, ".json"));
      for (const auto& s : samples) {
        DecodeResult r = decode_output(s.output);
        r.program.scale_mm_per_unit = s.scale_mm_per_unit;
        for (const auto& msg : r.diagnostics) std::cerr << s.id << ": " << msg << '\n';
        if (dec_out.empty() || dec_out == "-") {
          std::cout << "# id = " << s.id << '\n' << print_program(r.program);
        } else if (to_file) {
          save_program(r.program, dec_out);
        } else {
          fs::create_directories(dec_out);
          save_program(r.program, (fs::path(dec_out) / (s.id + ".plank")).string());
        }
      }
    } else if (*rec) {
      const DrawingSet d = load_drawing(rec_in);
      SearchOptions opts;
      opts.timeout = std::chrono::milliseconds(static_cast<long long>(rec_timeout * 1000.0));
      if (rec_sample) opts.sample_seed = resolve_seed(*rec_sample);
      const auto r = reconstruct(d, rec_variant == "verify" ? ReconVariant::Verify : ReconVariant::Union, opts);
      std::cerr << r.vertices << " vertices, " << r.edges << " edges, " << r.faces << " faces, "
                << r.candidates.size() << " blocks; " << status_name(r.solution.status) << " with "
                << r.solution.blocks.size() << " blocks\n";
      emit(solution_to_json(r.solution), rec_out);
      if (!rec_obj.empty()) {
        std::vector<Box> boxes;
        for (const auto& b : r.solution.blocks) boxes.insert(boxes.end(), b.cell_boxes.begin(), b.cell_boxes.end());
        emit(boxes_to_obj(boxes), rec_obj);
      }
    } else if (*ev) {
      const auto gt = index_dir(ev_gt, false);
      const auto pred = index_dir(ev_pred, true);
      std::vector<ModelScore> models;
      for (const auto& [id, gt_path] : gt) {
        const auto gt_boxes = resolve(load_program(gt_path));
        const auto it = pred.find(id);
        if (it == pred.end()) {
          models.push_back(failed_model(id, gt_boxes.size()));
          continue;
        }
        Prediction p = load_prediction(it->second);
        if (p.status && (*p.status == SolutionStatus::NoMatch || *p.status == SolutionStatus::Timeout)) {
          models.push_back(failed_model(id, gt_boxes.size()));
          continue;
        }
        if (p.status && !ev_no_group) {
          ReconSolution sol;
          for (const Box& b : p.boxes) {
            CandidateBlock blk;
            blk.aabb = b;
            blk.cell_boxes = {b};
            blk.volume = b.volume();
            sol.blocks.push_back(blk);
          }
          p.boxes = group_blocks(sol, gt_boxes);
        }
        models.push_back(score_model(id, p.boxes, gt_boxes, ev_thresh));
      }
      const MatchReport report = aggregate(std::move(models));
      emit(report_to_json(report), ev_out);
      std::cerr << report_table(report);
    } else if (*ex) {
      if (ex_obj.empty() && ex_svg.empty()) throw Error("export needs --obj and/or --svg");
      const bool is_drawing = ends_with(ex_in, ".drawing.json");
      if (!ex_svg.empty()) {
        DrawingSet d;
        if (is_drawing) {
          d = load_drawing(ex_in);
        } else {
          const auto p = load_prediction(ex_in);
          d = project(p.boxes);
        }
        emit(drawing_to_svg(d), ex_svg);
      }
      if (!ex_obj.empty()) {
        if (is_drawing) throw Error("a drawing has no 3D geometry to export as OBJ");
        emit(boxes_to_obj(load_prediction(ex_in).boxes), ex_obj);
      }
    } else if (*st) {
      const DatasetStats s = dataset_stats(st_dir);
      emit(stats_to_json(s), st_out);
      std::cerr << stats_table(s);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
