#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "plankforge/errors.hpp"
#include "plankforge/seq_codec.hpp"

using namespace plankforge;

namespace {

Program snapped(Program p) {
  for (auto& c : p.cuboids) {
    for (auto& ref : c.coords) {
      if (auto* lit = std::get_if<Literal>(&ref)) lit->value = snap_to_grid(lit->value);
    }
  }
  return p;
}

std::vector<OutputToken> bbox_prefix() {
  std::vector<OutputToken> t{{TokenKind::Sos, 0, 0, 0}};
  const int bins[6] = {100, 100, 100, 400, 400, 400};
  for (int d = 0; d < 6; ++d) t.push_back({TokenKind::Value, bins[d], 0, d});
  return t;
}

std::vector<int> legal_positions(const PointerMask& m) {
  std::vector<int> out;
  for (std::size_t i = 0; i < m.positions.size(); ++i) {
    if (m.positions[i]) out.push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace

TEST_CASE("quantize") {
  CHECK(quantize(-1.0) == 0);
  CHECK(quantize(1.0) == 511);
  // (0.35 + 1) / 2 * 511 = 344.925
  CHECK(quantize(0.35) == 345);
  CHECK(dequantize(0) == -1.0);
  CHECK(dequantize(511) == 1.0);
  bool clamped = false;
  CHECK(quantize(1.5, &clamped) == 511);
  CHECK(clamped);
  CHECK(quantize(-3.0, &clamped) == 0);
  quantize(0.2, &clamped);
  CHECK_FALSE(clamped);
  for (int b = 0; b < kNumBins; ++b) CHECK(quantize(dequantize(b)) == b);
  Rng rng(41);
  for (int i = 0; i < 20000; ++i) {
    const double x = rng.uniform(-1.0, 1.0);
    CHECK(std::abs(snap_to_grid(x) - x) <= 1.0 / 511.0);
  }
  CHECK(kVocabSize == 514);
}

TEST_CASE("encode input") {
  const DrawingSet one = project(std::vector<Box>{Box{{-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}}});
  const auto toks = encode_input(one);
  CHECK(toks.size() == 48);
  for (std::size_t i = 0; i < toks.size(); ++i) {
    CHECK(toks[i].coord_idx == static_cast<int>(i % 4));
    CHECK(toks[i].vis_type == VisType::Visible);
  }

  DrawingSet two = one;
  two[View::Top].edges.clear();
  const auto t2 = encode_input(two);
  REQUIRE(t2.size() == 32);
  CHECK(t2[16].view == 2);
  CHECK(t2[16].edge_idx == 0);
  CHECK(std::none_of(t2.begin(), t2.end(), [](const InputToken& t) { return t.view == 1; }));

  // edge order and endpoint order in the input do not matter
  const DrawingSet d = project(resolve(fixtures::listing()));
  DrawingSet shuffled = d;
  Rng rng(3);
  for (View v : kViews) {
    auto& es = shuffled[v].edges;
    for (std::size_t i = es.size(); i > 1; --i) {
      std::swap(es[i - 1], es[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
    }
    for (auto& e : es) std::swap(e.p1, e.p2);
  }
  CHECK(encode_input(shuffled) == encode_input(d));
}

TEST_CASE("encode listing") {
  const Program p = fixtures::listing();
  const auto toks = encode_output(p);
  REQUIRE(toks.size() == 50);
  CHECK(toks.front().kind == TokenKind::Sos);
  CHECK(toks.back().kind == TokenKind::Eos);
  CHECK(toks.back().plank_idx == 8);
  // plank1.x_min points at bbox.x_min
  CHECK(toks[dof_position(1, 0)].kind == TokenKind::Pointer);
  CHECK(toks[dof_position(1, 0)].arg == 1);
  CHECK(toks[1].kind == TokenKind::Value);
  CHECK(toks[1].arg == quantize(-0.35));
  CHECK(toks[4].arg == 345);
  for (int i = 1; i < 49; ++i) {
    CHECK(toks[i].plank_idx == ((i - 1) / 6));
    CHECK(toks[i].face_idx == (i - 1) % 6);
  }

  const std::vector<int> order = canonical_order(p);
  CHECK(order == std::vector<int>{0, 1, 2, 3, 6, 4, 7, 5});

  Program bare = parse_program("bbox = Cuboid(-1,-1,-1,1,1,1)");
  const auto b = encode_output(bare);
  REQUIRE(b.size() == 8);
  for (int i = 1; i <= 6; ++i) CHECK(b[i].kind == TokenKind::Value);
}

TEST_CASE("decode listing") {
  const Program p = fixtures::listing();
  const DecodeResult r = decode_output(encode_output(p));
  CHECK(r.bbox_present);
  CHECK(r.diagnostics.empty());
  CHECK(r.program.cuboids == snapped(canonicalize(p)).cuboids);
  CHECK(structurally_equal(r.program, canonicalize(p), 1.0 / 511.0));
}

TEST_CASE("decode edge cases") {
  const DecodeResult e = decode_output({{TokenKind::Sos, 0, 0, 0}, {TokenKind::Eos, 0, 0, 0}});
  CHECK(e.program.cuboids.empty());
  CHECK_FALSE(e.bbox_present);

  // plank 1 has zero x extent; plank 2 points at it
  auto t = bbox_prefix();
  const int p1[6] = {200, 100, 100, 200, 400, 400};
  for (int d = 0; d < 6; ++d) t.push_back({TokenKind::Value, p1[d], 1, d});
  t.push_back({TokenKind::Pointer, dof_position(1, 3), 2, 0});
  const int p2[5] = {100, 100, 300, 400, 400};
  for (int d = 1; d < 6; ++d) t.push_back({TokenKind::Value, p2[d - 1], 2, d});
  t.push_back({TokenKind::Eos, 0, 3, 0});
  const DecodeResult z = decode_output(t);
  REQUIRE(z.program.cuboids.size() == 2);
  CHECK(z.program.cuboids[1].coords[0] == CoordRef{Literal{dequantize(200)}});
  CHECK_FALSE(z.diagnostics.empty());

  // trailing tokens after EOS are ignored, incomplete planks dropped
  auto tail = bbox_prefix();
  tail.push_back({TokenKind::Value, 5, 1, 0});
  tail.push_back({TokenKind::Eos, 0, 1, 1});
  tail.push_back({TokenKind::Value, 5, 1, 2});
  const DecodeResult inc = decode_output(tail);
  CHECK(inc.program.cuboids.size() == 1);
  CHECK_FALSE(inc.diagnostics.empty());

  auto self = bbox_prefix();
  for (int d = 0; d < 3; ++d) self.push_back({TokenKind::Value, 150, 1, d});
  self.push_back({TokenKind::Pointer, dof_position(1, 0), 1, 3});
  for (int d = 4; d < 6; ++d) self.push_back({TokenKind::Value, 350, 1, d});
  CHECK_THROWS_AS(decode_output(self), MalformedPointerError);
  auto sos = bbox_prefix();
  sos.push_back({TokenKind::Pointer, 0, 1, 0});
  for (int d = 1; d < 6; ++d) sos.push_back({TokenKind::Value, 350, 1, d});
  CHECK_THROWS_AS(decode_output(sos), MalformedPointerError);
  auto fwd = bbox_prefix();
  fwd.push_back({TokenKind::Pointer, 9, 1, 0});
  for (int d = 1; d < 6; ++d) fwd.push_back({TokenKind::Value, 350, 1, d});
  CHECK_THROWS_AS(decode_output(fwd), MalformedPointerError);
}

TEST_CASE("pointer mask") {
  const auto prefix = bbox_prefix();
  const PointerMask m = legal_pointer_mask(prefix);
  // bbox attachments keep the same side
  CHECK(legal_positions(m) == std::vector<int>{1});
  CHECK(m.vocab[kEosToken]);
  CHECK_FALSE(m.vocab[kSosToken]);
  CHECK(m.vocab[0]);

  const auto toks = encode_output(fixtures::listing());
  for (int face = 0; face < 6; ++face) {
    const std::vector<OutputToken> pre(toks.begin(), toks.begin() + dof_position(7, face));
    const PointerMask pm = legal_pointer_mask(pre);
    CHECK(pm.vocab[kEosToken] == (face == 0));
    for (int pos : legal_positions(pm)) {
      const int tp = (pos - 1) / 6, tf = (pos - 1) % 6;
      CHECK(tp != 7);
      CHECK((tf % 3) == (face % 3));
      if (tp == 0) {
        CHECK(tf == face);
      } else {
        CHECK(tf == (face + 3) % 6);
      }
    }
    if (face == 3) {
      for (int pos : legal_positions(pm)) CHECK(((pos - 1) % 6 != 3 || (pos - 1) / 6 == 0));
    }
  }
}

TEST_CASE("mask accepts every encoded pointer") {
  for (const Program& p : fixtures::cabinets(100, 42)) {
    const auto toks = encode_output(p);
    for (std::size_t i = 1; i + 1 < toks.size(); ++i) {
      if (toks[i].kind != TokenKind::Pointer) continue;
      const std::vector<OutputToken> pre(toks.begin(), toks.begin() + static_cast<long>(i));
      const PointerMask m = legal_pointer_mask(pre);
      CHECK(m.positions[toks[i].arg]);
    }
  }
}

TEST_CASE("every legal pointer decodes") {
  const auto toks = encode_output(fixtures::listing());
  for (int pos = 7; pos < 49; ++pos) {
    const std::vector<OutputToken> pre(toks.begin(), toks.begin() + pos);
    for (int target : legal_positions(legal_pointer_mask(pre))) {
      auto t = toks;
      t[pos] = {TokenKind::Pointer, target, t[pos].plank_idx, t[pos].face_idx};
      CHECK_NOTHROW(decode_output(t));
    }
  }
}

TEST_CASE("round trip on generated programs") {
  for (const Program& p : fixtures::cabinets(300, 43)) {
    const auto toks = encode_output(p);
    CHECK(toks.size() == 6 * p.cuboids.size() + 2);
    const DecodeResult r = decode_output(toks);
    CHECK(r.program.cuboids == canonicalize(p).cuboids);
    CHECK(encode_output(r.program) == toks);
  }
}

TEST_CASE("encoding ignores plank order") {
  const Program p = fixtures::listing();
  const Program q = permute(p, std::vector<int>{0, 1, 2, 3, 6, 7, 4, 5});
  CHECK(encode_output(q) == encode_output(p));
}

TEST_CASE("jsonl") {
  SequenceSample s;
  s.id = "000007";
  s.scale_mm_per_unit = 1234.5;
  s.input = encode_input(project(resolve(fixtures::listing())));
  s.output = encode_output(fixtures::listing());
  const std::string line = sample_to_jsonl(s);
  CHECK(line.find('\n') == std::string::npos);
  CHECK(sample_from_jsonl(line) == s);
  CHECK_THROWS_AS(sample_from_jsonl(R"({"v":2,"id":"a","scale":1,"input":[],"output":[]})"), Error);
  CHECK_THROWS_AS(sample_from_jsonl("not json"), Error);
}
