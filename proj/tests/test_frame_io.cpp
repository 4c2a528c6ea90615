#include <bit>
#include <cmath>
#include <fstream>
#include <random>

#include "bgx/errors.hpp"
#include "bgx/frame_io.hpp"
#include "bgx/image_codec.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace bgx;
using bgx::testing::random_tensor;
using bgx::testing::TempDir;
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::vector<char> read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("PNG and PNM frames round trip within one quantisation step") {
  TempDir dir("codec");
  std::mt19937_64 rng(2);
  const Tensor frame = random_tensor({9, 13, 3}, rng);
  for (const char* name : {"a.png", "a.ppm"}) {
    save_frame(frame, dir / name);
    const Tensor back = load_image(dir / name);
    REQUIRE(back.shape() == frame.shape());
    CHECK(bgx::testing::max_abs_diff(back, frame) <= 0.5 / 255.0 + 1e-12);
  }
  // gray images come back replicated over the three channels
  const Tensor gray = random_tensor({4, 5}, rng);
  save_frame(gray, dir / "g.pgm");
  const Tensor g3 = load_image(dir / "g.pgm");
  CHECK(g3.shape() == Shape{4, 5, 3});
  CHECK(g3({2, 3, 0}) == g3({2, 3, 2}));
  CHECK(std::abs(g3({2, 3, 1}) - gray({2, 3})) <= 0.5 / 255.0 + 1e-12);
}

TEST_CASE("ASCII PNM with a non-255 maxval is scaled to [0, 1]") {
  TempDir dir("ascii");
  write_text(dir / "a.pgm", "P2\n# comment\n2 1\n15\n0 15\n");
  const Tensor t = load_image(dir / "a.pgm");
  CHECK(t({0, 0, 0}) == 0.0);
  CHECK(t({0, 1, 0}) == 1.0);
  write_text(dir / "c.ppm", "P3 1 1 255 255 0 51\n");
  const Tensor c = load_image(dir / "c.ppm");
  CHECK(c({0, 0, 0}) == 1.0);
  CHECK(c({0, 0, 2}) == doctest::Approx(0.2));
}

TEST_CASE("directory sequences load in filename order and honour max_frames") {
  TempDir dir("seq");
  for (int i : {2, 0, 1}) {
    Tensor f({3, 4, 3}, i / 10.0);
    save_frame(f, dir / ("f" + std::to_string(i) + ".png"));
  }
  write_text(dir / "notes.txt", "not an image");
  const Tensor video = load_sequence({dir.path(), std::nullopt});
  REQUIRE(video.shape() == Shape{3, 4, 3, 3});
  for (std::size_t f = 0; f < 3; ++f) CHECK(std::abs(video({1, 2, 0, f}) - f / 10.0) <= 0.5 / 255.0);
  CHECK(load_sequence({dir.path(), 2}).extent(3) == 2);
}

TEST_CASE("manifest files resolve paths relative to the manifest") {
  TempDir dir("manifest");
  fs::create_directories(dir / "imgs");
  save_frame(Tensor({2, 2, 3}, 0.2), dir / "imgs/b.png");
  save_frame(Tensor({2, 2, 3}, 0.8), dir / "imgs/a.png");
  write_text(dir / "list.txt", "# frames\nimgs/b.png\n\nimgs/a.png\n");
  const auto files = resolve_sequence({dir / "list.txt", std::nullopt});
  REQUIRE(files.size() == 2);
  CHECK(files[0].filename() == "b.png");
  const Tensor video = load_sequence({dir / "list.txt", std::nullopt});
  CHECK(std::abs(video({0, 0, 0, 0}) - 0.2) <= 0.5 / 255.0);
  CHECK(std::abs(video({0, 0, 0, 1}) - 0.8) <= 0.5 / 255.0);
}

TEST_CASE("ingest errors name the offending input") {
  TempDir dir("bad");
  CHECK_THROWS_AS(load_sequence({dir / "missing", std::nullopt}), IngestError);
  CHECK_THROWS_AS(load_sequence({dir.path(), std::nullopt}), IngestError);  // empty

  save_frame(Tensor({2, 2, 3}), dir / "a.png");
  save_frame(Tensor({3, 2, 3}), dir / "b.png");
  try {
    load_sequence({dir.path(), std::nullopt});
    FAIL("expected an ingest error");
  } catch (const IngestError& e) {
    CHECK(std::string(e.what()).find("b.png") != std::string::npos);
  }

  fs::remove(dir / "b.png");
  write_text(dir / "c.png", "garbage");
  try {
    load_sequence({dir.path(), std::nullopt});
    FAIL("expected an ingest error");
  } catch (const IngestError& e) {
    CHECK(std::string(e.what()).find("c.png") != std::string::npos);
  }
}

TEST_CASE("tensor files are bit exact and little endian") {
  TempDir dir("tensor");
  std::mt19937_64 rng(4);
  const Tensor t = random_tensor({3, 2, 5}, rng, -1e3, 1e3);
  write_tensor(t, dir / "t.bgt");
  CHECK(read_tensor(dir / "t.bgt") == t);

  const std::vector<char> bytes = read_bytes(dir / "t.bgt");
  REQUIRE(bytes.size() == 8 + 8 + 3 * 8 + 30 * 8);
  CHECK(std::string(bytes.data(), 8) == "BGXTNSR1");
  CHECK(static_cast<unsigned char>(bytes[8]) == 3);
  CHECK(static_cast<unsigned char>(bytes[16]) == 3);
  CHECK(static_cast<unsigned char>(bytes[24]) == 2);
  std::uint64_t first = 0;
  for (int b = 7; b >= 0; --b) first = (first << 8) | static_cast<unsigned char>(bytes[40 + b]);
  CHECK(std::bit_cast<double>(first) == t[0]);

  write_text(dir / "bad.bgt", "BGXTNSR0");
  CHECK_THROWS_AS(read_tensor(dir / "bad.bgt"), IoError);
  auto truncated = bytes;
  truncated.pop_back();
  std::ofstream(dir / "short.bgt", std::ios::binary).write(truncated.data(), truncated.size());
  CHECK_THROWS_AS(read_tensor(dir / "short.bgt"), IoError);
}

TEST_CASE("luma uses BT.601 weights") {
  Tensor frame({1, 2, 3}, {1.0, 0.0, 0.0, 0.2, 0.4, 0.6});
  const Tensor g = to_gray_frame(frame);
  CHECK(g.shape() == Shape{1, 2});
  CHECK(g[0] == doctest::Approx(0.299));
  CHECK(g[1] == doctest::Approx(0.299 * 0.2 + 0.587 * 0.4 + 0.114 * 0.6));
  CHECK_THROWS_AS(to_gray(Tensor({2, 2, 2, 2})), InvalidArgument);
}

TEST_CASE("masks round trip through black and white images") {
  TempDir dir("mask");
  ForegroundMask m(3, 4);
  m.at(1, 2) = 1;
  m.at(0, 0) = 1;
  save_mask(m, dir / "m.png");
  CHECK(load_mask(dir / "m.png") == m);
  m.labels[5] = 2;
  CHECK_THROWS_AS(save_mask(m, dir / "x.png"), InvalidArgument);
}

TEST_CASE("gather_frames and frame_at pick frames in list order") {
  std::mt19937_64 rng(6);
  const Tensor video = random_tensor({2, 3, 3, 5}, rng);
  const std::vector<std::size_t> idx{4, 1};
  const Tensor sub = gather_frames(video, idx);
  CHECK(sub.shape() == Shape{2, 3, 3, 2});
  CHECK(sub({1, 2, 1, 0}) == video({1, 2, 1, 4}));
  CHECK(sub({0, 1, 2, 1}) == video({0, 1, 2, 1}));
  CHECK(frame_at(video, 3)({1, 0, 2}) == video({1, 0, 2, 3}));
  CHECK_THROWS_AS(gather_frames(video, std::vector<std::size_t>{5}), InvalidArgument);
}

TEST_CASE("atomic writes leave no temporary file behind") {
  TempDir dir("atomic");
  write_file_atomic(dir / "x.txt", {'h', 'i'});
  CHECK(read_bytes(dir / "x.txt") == std::vector<char>{'h', 'i'});
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path())) ++entries;
  CHECK(entries == 1);
  CHECK_THROWS_AS(write_file_atomic(dir / "no/such/dir/x.txt", {'a'}), IoError);
}
