#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>

#include "feqo/checksum.hpp"
#include "feqo/grid_io.hpp"
#include "feqo/heatmap.hpp"

using namespace feqo;

namespace {

DataGrid ramp(std::size_t rows, std::size_t cols, double lo, double hi) {
    DataGrid g;
    g.rows = rows;
    g.cols = cols;
    g.bounds = {0.0, 1.0, -3.0, 3.0};
    for (std::size_t i = 0; i < rows * cols; ++i)
        g.values.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(rows * cols - 1));
    return g;
}

}  // namespace

TEST(GridIo, RoundTrip) {
    const DataGrid g = ramp(3, 5, -1.0, 2.0);
    const DataGrid back = decode_grid(encode_grid(g));
    EXPECT_EQ(back.rows, 3u);
    EXPECT_EQ(back.cols, 5u);
    EXPECT_EQ(back.bounds, g.bounds);
    EXPECT_EQ(back.values, g.values);
}

TEST(GridIo, HeaderLayout) {
    const std::string b = encode_grid(ramp(2, 3, 0.0, 1.0));
    ASSERT_EQ(b.size(), 56u + 6u * 8u);
    EXPECT_EQ(b.substr(0, 4), "FEQO");
    std::uint32_t version = 0;
    std::uint64_t rows = 0, cols = 0;
    double b2 = 0.0;
    std::memcpy(&version, b.data() + 4, 4);
    std::memcpy(&rows, b.data() + 8, 8);
    std::memcpy(&cols, b.data() + 16, 8);
    std::memcpy(&b2, b.data() + 40, 8);
    EXPECT_EQ(version, 1u);
    EXPECT_EQ(rows, 2u);
    EXPECT_EQ(cols, 3u);
    EXPECT_EQ(b2, -3.0);
}

TEST(GridIo, MalformedInputIsAnIoError) {
    const std::string good = encode_grid(ramp(2, 3, 0.0, 1.0));
    EXPECT_THROW(decode_grid(good.substr(0, 20)), IoError);
    EXPECT_THROW(decode_grid(good.substr(0, good.size() - 1)), IoError);
    std::string bad_magic = good;
    bad_magic[0] = 'X';
    EXPECT_THROW(decode_grid(bad_magic), IoError);
    std::string bad_version = good;
    bad_version[4] = 9;
    EXPECT_THROW(decode_grid(bad_version), IoError);
    EXPECT_THROW(read_grid("/nonexistent/grid.bin"), IoError);
}

TEST(GridIo, FileRoundTrip) {
    const auto path = std::filesystem::temp_directory_path() / "feqo_unit_grid.bin";
    const DataGrid g = ramp(4, 4, 0.0, 1.0);
    write_grid(path.string(), g);
    EXPECT_EQ(read_grid(path.string()).values, g.values);
    std::filesystem::remove(path);
    EXPECT_THROW(write_file("/nonexistent/dir/x.bin", "abc"), IoError);
}

TEST(Heatmap, UniformGridIsOneColour) {
    DataGrid g = ramp(4, 4, 0.0, 1.0);
    std::fill(g.values.begin(), g.values.end(), 2.5);
    const auto img = parse_ppm(render_heatmap(g));
    EXPECT_EQ(img.width, 4u);
    EXPECT_EQ(img.height, 4u);
    for (std::size_t i = 3; i < img.pixels.size(); ++i) EXPECT_EQ(img.pixels[i], img.pixels[i % 3]);
}

TEST(Heatmap, RampEndsAtTheMapExtremes) {
    const auto img = parse_ppm(render_heatmap(ramp(1, 256, 0.0, 1.0)));
    const auto px = [&](std::size_t i) { return static_cast<unsigned char>(img.pixels[i]); };
    // dark start, bright end
    EXPECT_LT(px(0) + px(1) + px(2), 20);
    EXPECT_GT(px(765) + px(766) + px(767), 600);
}

TEST(Heatmap, DivergingCentresZeroOnWhite) {
    const auto img = parse_ppm(render_heatmap(ramp(1, 3, -1.0, 1.0)));
    EXPECT_EQ(static_cast<unsigned char>(img.pixels[3]), 247);
    EXPECT_EQ(static_cast<unsigned char>(img.pixels[4]), 247);
    EXPECT_EQ(static_cast<unsigned char>(img.pixels[5]), 247);
}

TEST(Heatmap, SymLogLiftsSmallValues) {
    DataGrid g = ramp(1, 3, 0.0, 1.0);
    g.values = {0.0, 1e-3, 1.0};
    const auto lin = parse_ppm(render_heatmap(g));
    const auto log = parse_ppm(render_heatmap(g, {Scale::SymLog, ColorMap::Sequential}));
    auto sum = [](const PpmImage& im, std::size_t p) {
        return static_cast<unsigned char>(im.pixels[3 * p]) + static_cast<unsigned char>(im.pixels[3 * p + 1]) +
               static_cast<unsigned char>(im.pixels[3 * p + 2]);
    };
    EXPECT_GT(sum(log, 1), sum(lin, 1) + 50);
}

TEST(Heatmap, DeterministicAndValidated) {
    const DataGrid g = ramp(7, 9, -2.0, 5.0);
    EXPECT_EQ(render_heatmap(g), render_heatmap(g));
    DataGrid bad = g;
    bad.values[3] = NAN;
    EXPECT_THROW(render_heatmap(bad), NumericalError);
    bad.values.pop_back();
    EXPECT_THROW(render_heatmap(bad), DomainError);
    EXPECT_THROW(parse_ppm("P5\n1 1\n255\n\0"), IoError);
    EXPECT_THROW(parse_ppm("P6\n2 2\n255\nabc"), IoError);
}

TEST(Checksum, KnownVectors) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}
