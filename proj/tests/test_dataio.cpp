#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <png.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "rsrlab/dataio.hpp"
#include "rsrlab/rng.hpp"

using namespace rsrlab;

namespace {

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

Image random_image(int c, int h, int w, uint64_t seed) {
  Image img(c, h, w);
  Rng rng(seed);
  for (int64_t i = 0; i < img.px.size(); ++i)
    img.px.data()[i] = static_cast<float>(rng.uniform());
  return img;
}

// ---- independent bicubic oracle: direct 2D product-kernel convolution ----

double keys_cubic(double t) {
  t = std::abs(t);
  if (t < 1.0) return (1.5 * t - 2.5) * t * t + 1.0;
  if (t < 2.0) return ((-0.5 * t + 2.5) * t - 4.0) * t + 2.0;
  return 0.0;
}

int reflect_idx(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -1 - i;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

// weights along one axis for output index o, normalized to sum 1
std::vector<double> axis_weights(int o, int s, int* first) {
  const double center = (o + 0.5) * s - 0.5;
  const int lo = static_cast<int>(std::ceil(center - 2.0 * s));
  const int hi = static_cast<int>(std::floor(center + 2.0 * s));
  std::vector<double> w(hi - lo + 1);
  double sum = 0.0;
  for (int i = lo; i <= hi; ++i) {
    w[i - lo] = keys_cubic((i - center) / s);
    sum += w[i - lo];
  }
  for (auto& v : w) v /= sum;
  *first = lo;
  return w;
}

Image bicubic_oracle(const Image& img, int s) {
  const int c = img.channels(), h = img.height(), w = img.width();
  Image out(c, h / s, w / s);
  for (int ch = 0; ch < c; ++ch)
    for (int oy = 0; oy < h / s; ++oy)
      for (int ox = 0; ox < w / s; ++ox) {
        int y0 = 0, x0 = 0;
        const auto wy = axis_weights(oy, s, &y0);
        const auto wx = axis_weights(ox, s, &x0);
        double acc = 0.0;
        for (size_t ky = 0; ky < wy.size(); ++ky)
          for (size_t kx = 0; kx < wx.size(); ++kx)
            acc += wy[ky] * wx[kx] *
                   img.at(ch, reflect_idx(y0 + static_cast<int>(ky), h),
                          reflect_idx(x0 + static_cast<int>(kx), w));
        out.at(ch, oy, ox) = static_cast<float>(std::clamp(acc, 0.0, 1.0));
      }
  return out;
}

// 16-bit grayscale PNG writer (the library only writes 8-bit, so the 16-bit
// read path needs an external producer)
void write_gray16_png(const std::string& path, int h, int w,
                      const std::vector<uint16_t>& vals) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  REQUIRE(fp != nullptr);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  REQUIRE(setjmp(png_jmpbuf(png)) == 0);
  png_init_io(png, fp);
  png_set_IHDR(png, info, w, h, 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  std::vector<png_byte> buf(static_cast<size_t>(h) * w * 2);
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y) {
    rows[y] = buf.data() + static_cast<size_t>(y) * w * 2;
    for (int x = 0; x < w; ++x) {
      const uint16_t v = vals[static_cast<size_t>(y) * w + x];
      rows[y][2 * x] = static_cast<png_byte>(v >> 8);  // big-endian samples
      rows[y][2 * x + 1] = static_cast<png_byte>(v & 0xff);
    }
  }
  png_set_rows(png, info, rows.data());
  png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

void write_palette_png(const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  REQUIRE(fp != nullptr);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  REQUIRE(setjmp(png_jmpbuf(png)) == 0);
  png_init_io(png, fp);
  png_set_IHDR(png, info, 2, 2, 8, PNG_COLOR_TYPE_PALETTE, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_color palette[2] = {{0, 0, 0}, {255, 255, 255}};
  png_set_PLTE(png, info, palette, 2);
  png_byte row0[2] = {0, 1}, row1[2] = {1, 0};
  png_bytep rows[2] = {row0, row1};
  png_set_rows(png, info, rows);
  png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

}  // namespace

TEST_CASE("png round trip stays within the 8-bit quantization bound") {
  const std::string path = tmp_path("rsrlab_rt.png");
  for (int c : {1, 3}) {
    const Image img = random_image(c, 13, 9, 0x1000 + c);
    save_image(img, path);
    const Image back = load_image(path);
    REQUIRE(back.channels() == c);
    REQUIRE(back.height() == 13);
    REQUIRE(back.width() == 9);
    for (int64_t i = 0; i < img.px.size(); ++i)
      CHECK(std::abs(back.px.data()[i] - img.px.data()[i]) <= 1.0f / 510.0f);
  }
}

TEST_CASE("png code mapping hits the documented values") {
  const std::string path = tmp_path("rsrlab_codes.png");
  Image img(1, 1, 4);
  img.at(0, 0, 0) = 0.0f;
  img.at(0, 0, 1) = 1.0f;
  img.at(0, 0, 2) = 0.5f;   // round(127.5) rounds half up -> code 128
  img.at(0, 0, 3) = 1.3f;   // clamped -> 255
  save_image(img, path);
  const Image back = load_image(path);
  CHECK(back.at(0, 0, 0) == 0.0f);
  CHECK(back.at(0, 0, 1) == 1.0f);
  CHECK(back.at(0, 0, 2) == 128.0f / 255.0f);  // 0.5 encodes as code 128 (round half up)
  CHECK(back.at(0, 0, 3) == 1.0f);
}

TEST_CASE("16-bit grayscale png decodes with the 16-bit divisor") {
  const std::string path = tmp_path("rsrlab_g16.png");
  write_gray16_png(path, 1, 3, {0, 32768, 65535});
  const Image img = load_image(path);
  REQUIRE(img.channels() == 1);
  CHECK(img.at(0, 0, 0) == 0.0f);
  CHECK(img.at(0, 0, 1) == doctest::Approx(32768.0 / 65535.0).epsilon(1e-9));
  CHECK(img.at(0, 0, 2) == 1.0f);
}

TEST_CASE("png loader errors") {
  CHECK_THROWS_AS(load_image(tmp_path("rsrlab_does_not_exist.png")), IoError);

  const std::string garbage = tmp_path("rsrlab_garbage.png");
  std::FILE* fp = std::fopen(garbage.c_str(), "wb");
  std::fputs("definitely not a png", fp);
  std::fclose(fp);
  CHECK_THROWS_AS(load_image(garbage), FormatError);

  const std::string palette = tmp_path("rsrlab_palette.png");
  write_palette_png(palette);
  CHECK_THROWS_AS(load_image(palette), FormatError);
}

TEST_CASE("bicubic downsample preserves constants and shapes") {
  for (int s : {2, 4}) {
    Image img(3, 4 * s, 2 * s);
    for (int64_t i = 0; i < img.px.size(); ++i) img.px.data()[i] = 0.37f;
    const Image out = bicubic_downsample(img, s);
    REQUIRE(out.height() == 4);
    REQUIRE(out.width() == 2);
    for (int64_t i = 0; i < out.px.size(); ++i)
      CHECK(std::abs(out.px.data()[i] - 0.37f) <= 1e-9f);
  }
  const Image one = bicubic_downsample(random_image(1, 4, 4, 7), 4);
  CHECK(one.height() == 1);
  CHECK(one.width() == 1);
}

TEST_CASE("bicubic downsample matches the direct 2D convolution oracle") {
  struct Case {
    int c, h, w, s;
  };
  for (const Case& tc : {Case{1, 8, 8, 2}, Case{3, 12, 8, 2}, Case{3, 12, 12, 3},
                         Case{3, 16, 16, 4}, Case{1, 24, 16, 4}}) {
    const Image img = random_image(tc.c, tc.h, tc.w, 0x2000 + tc.h + tc.s);
    const Image got = bicubic_downsample(img, tc.s);
    const Image want = bicubic_oracle(img, tc.s);
    REQUIRE(got.px.same_shape(want.px));
    for (int64_t i = 0; i < got.px.size(); ++i) {
      CHECK(std::abs(got.px.data()[i] - want.px.data()[i]) <= 1e-6f);
      CHECK(got.px.data()[i] >= 0.0f);
      CHECK(got.px.data()[i] <= 1.0f);
    }
  }
}

TEST_CASE("bicubic downsample rejects non-divisible dims and s=1 is identity") {
  const Image img = random_image(3, 9, 8, 3);
  CHECK_THROWS_AS(bicubic_downsample(img, 2), DimensionError);
  const Image same = bicubic_downsample(img, 1);
  for (int64_t i = 0; i < img.px.size(); ++i)
    CHECK(same.px.data()[i] == img.px.data()[i]);
}

TEST_CASE("crop_patches grid anchors and row-major order") {
  const Image img = random_image(1, 8, 8, 11);

  auto whole = crop_patches(img, 8, 8, 0);
  REQUIRE(whole.size() == 1);
  for (int64_t i = 0; i < img.px.size(); ++i)
    CHECK(whole[0].px.data()[i] == img.px.data()[i]);

  auto tiles = crop_patches(img, 4, 4, 0);
  REQUIRE(tiles.size() == 4);
  CHECK(tiles[1].at(0, 0, 0) == img.at(0, 0, 4));  // row-major: (0,0),(0,4),(4,0),(4,4)
  CHECK(tiles[2].at(0, 0, 0) == img.at(0, 4, 0));

  const Image big = random_image(1, 10, 10, 12);
  auto nine = crop_patches(big, 4, 4, 0);
  REQUIRE(nine.size() == 9);
  const int anchors[3] = {0, 4, 6};  // last anchor pinned to the edge (10 - 4)
  for (int iy = 0; iy < 3; ++iy)
    for (int ix = 0; ix < 3; ++ix)
      CHECK(nine[iy * 3 + ix].at(0, 0, 0) == big.at(0, anchors[iy], anchors[ix]));

  CHECK_THROWS_AS(crop_patches(img, 9, 4, 0), DimensionError);
}

TEST_CASE("crop_patches covers every pixel when stride <= size") {
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const int h = 8 + static_cast<int>(rng.below(20));
    const int w = 8 + static_cast<int>(rng.below(20));
    const int size = 4 + static_cast<int>(rng.below(4));
    const int stride = 1 + static_cast<int>(rng.below(size));
    Image img(1, h, w);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) img.at(0, y, x) = static_cast<float>(y * w + x);
    std::set<int> seen;
    for (const auto& p : crop_patches(img, size, stride, 0))
      for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) seen.insert(static_cast<int>(p.at(0, y, x)));
    CHECK(static_cast<int>(seen.size()) == h * w);
  }
}

TEST_CASE("make_pair builds scale-consistent pairs") {
  Image hr(3, 16, 16);
  for (int64_t i = 0; i < hr.px.size(); ++i) hr.px.data()[i] = 0.5f;
  const PatchPair pp = make_pair(hr, 4);
  CHECK(pp.scale == 4);
  CHECK(pp.lr.height() == 4);
  CHECK(pp.lr.width() == 4);
  for (int64_t i = 0; i < pp.lr.px.size(); ++i)
    CHECK(std::abs(pp.lr.px.data()[i] - 0.5f) <= 1e-9f);

  const Image hr2 = random_image(3, 8, 8, 21);
  const PatchPair pp2 = make_pair(hr2, 2);
  CHECK(pp2.lr.height() == 4);
  CHECK_NOTHROW(pp2.check());
}

TEST_CASE("corruption spec parse, label and validation") {
  const CorruptionSpec g = CorruptionSpec::parse("gaussian:0.04", 5);
  CHECK(g.kind == CorruptionSpec::Kind::gaussian);
  CHECK(g.strength == doctest::Approx(0.04));
  CHECK(g.seed == 5);
  CHECK(g.label() == "gaussian:0.04");
  CHECK(CorruptionSpec::parse("salt_pepper:0.02", 0).label() == "salt_pepper:0.02");
  CHECK(CorruptionSpec::parse("quantize:16", 0).label() == "quantize:16");

  CHECK_THROWS_AS(CorruptionSpec::parse("gaussian", 0), ConfigError);
  CHECK_THROWS_AS(CorruptionSpec::parse("speckle:0.1", 0), ConfigError);
  CHECK_THROWS_AS(CorruptionSpec::parse("gaussian:oops", 0), ConfigError);
  CHECK_THROWS_AS(CorruptionSpec::parse("gaussian:1.5", 0), ConfigError);
  CHECK_THROWS_AS(CorruptionSpec::parse("salt_pepper:-0.1", 0), ConfigError);
  CHECK_THROWS_AS(CorruptionSpec::parse("quantize:1", 0), ConfigError);
}

TEST_CASE("degrade examples") {
  const Image img = random_image(3, 6, 6, 31);

  CorruptionSpec g{CorruptionSpec::Kind::gaussian, 0.0, 7};
  const Image same = degrade(img, g);
  for (int64_t i = 0; i < img.px.size(); ++i)
    CHECK(same.px.data()[i] == img.px.data()[i]);

  CorruptionSpec sp{CorruptionSpec::Kind::salt_pepper, 1.0, 7};
  const Image snow = degrade(img, sp);
  for (int64_t i = 0; i < snow.px.size(); ++i)
    CHECK((snow.px.data()[i] == 0.0f || snow.px.data()[i] == 1.0f));

  CorruptionSpec sp0{CorruptionSpec::Kind::salt_pepper, 0.0, 7};
  const Image untouched = degrade(img, sp0);
  for (int64_t i = 0; i < img.px.size(); ++i)
    CHECK(untouched.px.data()[i] == img.px.data()[i]);

  Image point(1, 1, 1);
  point.at(0, 0, 0) = 0.6f;
  CorruptionSpec q2{CorruptionSpec::Kind::quantize, 2, 0};
  CHECK(degrade(point, q2).at(0, 0, 0) == 1.0f);  // round(0.6 * 1) / 1

  CorruptionSpec q16{CorruptionSpec::Kind::quantize, 16, 0};
  const Image q = degrade(img, q16);
  for (int64_t i = 0; i < q.px.size(); ++i) {
    const double scaled = q.px.data()[i] * 15.0;
    CHECK(std::abs(scaled - std::round(scaled)) < 1e-5);
  }
}

TEST_CASE("degrade is deterministic and respects [0,1]") {
  Rng rng(55);
  for (int trial = 0; trial < 12; ++trial) {
    const Image img = random_image(3, 7, 5, 0x4000 + trial);
    CorruptionSpec spec;
    const int which = trial % 3;
    spec.kind = which == 0   ? CorruptionSpec::Kind::gaussian
                : which == 1 ? CorruptionSpec::Kind::salt_pepper
                             : CorruptionSpec::Kind::quantize;
    spec.strength = which == 2 ? 2.0 + rng.below(30) : rng.uniform();
    spec.seed = rng.bits();
    const Image a = degrade(img, spec);
    const Image b = degrade(img, spec);
    for (int64_t i = 0; i < a.px.size(); ++i) {
      CHECK(a.px.data()[i] == b.px.data()[i]);
      CHECK(a.px.data()[i] >= 0.0f);
      CHECK(a.px.data()[i] <= 1.0f);
    }
  }
}

TEST_CASE("degrade rejects invalid strengths") {
  const Image img = random_image(1, 4, 4, 61);
  CHECK_THROWS_AS(degrade(img, {CorruptionSpec::Kind::gaussian, -0.1, 0}), ConfigError);
  CHECK_THROWS_AS(degrade(img, {CorruptionSpec::Kind::salt_pepper, 1.2, 0}), ConfigError);
  CHECK_THROWS_AS(degrade(img, {CorruptionSpec::Kind::quantize, 1.0, 0}), ConfigError);
}
