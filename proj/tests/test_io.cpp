#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "doctest.h"
#include "forge/image_io.hpp"
#include "forge/weight_io.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace forge;

namespace {

std::uint32_t le32(const std::string& b, std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[off + i]);
    return v;
}

float lef32(const std::string& b, std::size_t off) { return std::bit_cast<float>(le32(b, off)); }

}  // namespace

TEST_CASE("SVCW matrix layout") {
    const Matrix m(2, 3, {1, -2, 3.5, 0.25, 5, -6});
    const std::string bytes = encode_svcw(m);
    REQUIRE(bytes.size() == 24 + 6 * 4);
    CHECK(bytes.substr(0, 4) == "SVCW");
    CHECK(le32(bytes, 4) == 1);
    CHECK(le32(bytes, 8) == 0);
    CHECK(le32(bytes, 12) == 2);
    CHECK(le32(bytes, 16) == 3);
    CHECK(le32(bytes, 20) == 0);
    CHECK(lef32(bytes, 24 + 4 * 2) == 3.5f);
    const SvcwFile f = decode_svcw(bytes);
    CHECK(f.kind == SvcwKind::matrix);
    CHECK(f.matrix == m);
}

TEST_CASE("SVCW adapter layout and rejection") {
    RandomStream rs(6);
    Matrix a(5, 2), b(2, 4);
    for (double& v : a.data()) v = rs.uniform(-1, 1);
    for (double& v : b.data()) v = rs.uniform(-1, 1);
    const std::string bytes = encode_svcw(LoraAdapter{a, b});
    CHECK(le32(bytes, 8) == 1);
    CHECK(le32(bytes, 12) == 5);
    CHECK(le32(bytes, 16) == 4);
    CHECK(le32(bytes, 20) == 2);
    CHECK(lef32(bytes, 24) == static_cast<float>(a(0, 0)));
    CHECK(lef32(bytes, 24 + 4 * 10) == static_cast<float>(b(0, 0)));
    const SvcwFile f = decode_svcw(bytes);
    CHECK(f.kind == SvcwKind::adapter);
    CHECK(f.adapter.a == to_float32(a));
    CHECK(f.adapter.b == to_float32(b));
    CHECK_THROWS(decode_svcw("SVCX" + bytes.substr(4)));
    CHECK_THROWS(decode_svcw(bytes.substr(0, bytes.size() - 4)));
    std::string v2 = bytes;
    v2[4] = 2;
    CHECK_THROWS(decode_svcw(v2));
}

TEST_CASE("kernel fixtures reproduce from their SVCW inputs") {
    test::TempDir dir("fixtures");
    export_kernel_fixtures(dir.path(), 2023);
    const auto doc = nlohmann::json::parse(read_file_bytes(dir.path() / "fixtures.json"));
    const double tol = doc.at("tolerance").get<double>();
    auto close = [&](const Matrix& x, const Matrix& y) {
        if (x.rows() != y.rows() || x.cols() != y.cols()) return false;
        for (std::size_t i = 0; i < x.data().size(); ++i)
            if (std::abs(x.data()[i] - y.data()[i]) > tol) return false;
        return true;
    };
    for (const auto& c : doc.at("lora_collapse")) {
        const Matrix w = read_svcw(dir.path() / c.at("weights").get<std::string>()).matrix;
        const LoraAdapter ad = read_svcw(dir.path() / c.at("adapter").get<std::string>()).adapter;
        CHECK(ad.rank() == 16);
        CHECK(close(lora_collapse(w, ad), read_svcw(dir.path() / c.at("expected").get<std::string>()).matrix));
    }
    for (const auto& c : doc.at("average_weights")) {
        const Matrix s = read_svcw(dir.path() / c.at("src").get<std::string>()).matrix;
        const Matrix f = read_svcw(dir.path() / c.at("ft").get<std::string>()).matrix;
        CHECK(close(average_weights(s, f, c.at("alpha").get<double>()),
                    read_svcw(dir.path() / c.at("expected").get<std::string>()).matrix));
    }
    CHECK(doc.at("adain_transfer").size() == 2);
    for (const auto& c : doc.at("split_caption")) {
        const auto chunks = c.at("chunks").get<std::vector<std::string>>();
        CHECK(split_caption(c.at("text").get<std::string>(), c.at("budget").get<std::size_t>()) == chunks);
    }
}

TEST_CASE("PPM, PGM and depth encodings") {
    const std::vector<float> rgb{0, 0.5f, 1, 1, 0, 0.25f};
    const std::string ppm = encode_ppm(2, 1, rgb);
    CHECK(ppm.rfind("P6\n2 1\n255\n", 0) == 0);
    const Rgb8Image img = decode_ppm(ppm);
    CHECK(img.values == std::vector<std::uint8_t>{0, 128, 255, 255, 0, 64});

    const std::vector<std::uint16_t> mask{0, 1, 258, 65535};
    const std::string pgm = encode_pgm16(2, 2, mask);
    CHECK(pgm.rfind("P5\n2 2\n65535\n", 0) == 0);
    const std::size_t body = pgm.size() - 8;
    CHECK(static_cast<unsigned char>(pgm[body + 4]) == 1);  // 258 big-endian
    CHECK(static_cast<unsigned char>(pgm[body + 5]) == 2);
    CHECK(decode_pgm16(pgm).values == mask);

    const std::vector<float> depth{1.5f, std::numeric_limits<float>::infinity(), 0.25f};
    const std::string d = encode_depth(3, 1, depth);
    CHECK(d.substr(0, 8) == "DEPTHF32");
    CHECK(le32(d, 8) == 3);
    CHECK(le32(d, 12) == 1);
    CHECK(le32(d, 20) == 0x7F800000u);
    CHECK(decode_depth(d).values == depth);
    CHECK_THROWS(decode_depth("DEPTHF32"));
    CHECK_THROWS(decode_pgm16("P6\n1 1\n255\n..."));
}
