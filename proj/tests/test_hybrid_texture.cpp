#include "doctest.h"

#include "nvr/errors.hpp"
#include "nvr/hybrid_texture.hpp"
#include "nvr/io.hpp"
#include "support.hpp"

using namespace nvr;

TEST_SUITE("hybrid_texture") {

TEST_CASE("fresh texture has 18 zero channels") {
  HybridTexture t(5, 8);
  CHECK(t.values().sizes() == torch::IntArrayRef({5, 18, 8, 8}));
  CHECK(t.values().abs().max().item<float>() == 0.0f);
  CHECK_THROWS_AS(HybridTexture(torch::zeros({2, 17, 4, 4})), ShapeError);
}

TEST_CASE("initialisation matches the unwrap oracle at covered texels") {
  const auto seq = generate_sequence(test::dance_scene(6, 8, 0.5, 31));
  const int R = 16;
  const auto init = initialize_from_video(seq, R);
  const auto oracle = brute_force_unwrap(seq, R);
  auto v = init.texture.values().to(torch::kFloat64);
  auto a = v.accessor<double, 4>();
  int covered = 0;
  for (int p = 0; p < 6; ++p) {
    for (int y = 0; y < R; ++y) {
      for (int x = 0; x < R; ++x) {
        if (!oracle.covered(p, y, x)) continue;
        ++covered;
        for (int c = 0; c < 3; ++c) CHECK(std::abs(a[p][c][y][x] - oracle.color[3 * oracle.texel(p, y, x) + c]) <= 1e-6);
      }
    }
  }
  CHECK(covered > 100);
  CHECK(v.narrow(1, 3, 15).abs().max().item<double>() == 0.0);
  CHECK(torch::isfinite(v).all().item<bool>());
}

TEST_CASE("constant-coloured part initialises to its colour") {
  SceneConfig c = test::dance_scene(4, 4, 0.0, 2);
  for (auto& t : c.texture_spec) t.pattern = static_cast<int>(scene::Pattern::kSolid);
  const auto seq = generate_sequence(c);
  const auto init = initialize_from_video(seq, 8);
  const auto oracle = brute_force_unwrap(seq, 8);
  for (int p = 0; p < 4; ++p) {
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 8; ++x) {
        if (!oracle.covered(p, y, x)) continue;
        for (int ch = 0; ch < 3; ++ch) {
          CHECK(init.texture.values()[p][ch][y][x].item<float>() ==
                doctest::Approx(c.texture_spec[p].base_color[ch]).epsilon(1e-6));
        }
      }
    }
  }
}

TEST_CASE("uncovered parts are flagged and filled with grey") {
  SyntheticSequence seq;
  seq.skeleton.n_joints = 3;
  seq.skeleton.bones = {{0, 1}, {1, 2}};
  seq.skeleton.palette = {{1, 0, 0}, {0, 1, 0}};
  seq.skeleton.radius = {1, 1};
  seq.skeleton.depth = {1, 2};
  seq.background = Image(4, 4, 3);
  Image f(4, 4, 3, 0.25f);
  LabelMap ids(4, 4);
  ids.at(0, 0) = 1;
  seq.frames.push_back(f);
  seq.part_id.push_back(ids);
  seq.uv.push_back(Image(4, 4, 2));
  const auto init = initialize_from_video(seq, 4);
  CHECK(init.uncovered_parts == std::vector<int>{2});
  CHECK(init.texture.values()[1].narrow(0, 0, 3).eq(0.5f).all().item<bool>());
  // A single covered texel spreads to the whole chart.
  CHECK(init.texture.values()[0].narrow(0, 0, 3).sub(0.25f).abs().max().item<float>() < 1e-6f);
}

TEST_CASE("save/load round trip and previews") {
  const auto dir = test::temp_dir("texture_io");
  torch::manual_seed(3);
  HybridTexture t(torch::randn({3, 18, 5, 5}));
  save_texture(dir / "t.htx", t);
  const HybridTexture back = load_texture(dir / "t.htx");
  CHECK(torch::equal(back.values(), t.values()));

  HybridTexture zero(2, 4);
  save_texture(dir / "z.htx", zero);
  CHECK(load_texture(dir / "z.htx").values().abs().max().item<float>() == 0.0f);

  export_texture_previews(dir, t);
  for (int p = 1; p <= 3; ++p) {
    char name[32];
    std::snprintf(name, sizeof(name), "texture_part_%02d.png", p);
    const Image img = io::read_png_rgb(dir / name);
    CHECK(img.height == 5);
  }
}

TEST_CASE("corrupt texture files are format errors") {
  const auto dir = test::temp_dir("texture_bad");
  HybridTexture t(2, 4);
  save_texture(dir / "t.htx", t);
  const std::string bytes = io::read_file(dir / "t.htx");
  io::write_file(dir / "trunc.htx", bytes.substr(0, bytes.size() - 1));
  CHECK_THROWS_AS(load_texture(dir / "trunc.htx"), FormatError);
  std::string bad = bytes;
  bad[0] = 'X';
  io::write_file(dir / "magic.htx", bad);
  CHECK_THROWS_AS(load_texture(dir / "magic.htx"), FormatError);
  std::string dims = bytes;
  dims[8] = 17;  // channel count
  io::write_file(dir / "dims.htx", dims);
  CHECK_THROWS_AS(load_texture(dir / "dims.htx"), FormatError);
}

TEST_CASE("finite check") {
  HybridTexture t(1, 2);
  CHECK_NOTHROW(t.check_finite());
  t.values()[0][4][1][1] = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(t.check_finite(), NumericalError);
}

}  // TEST_SUITE
