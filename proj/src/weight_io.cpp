#include "forge/weight_io.hpp"

#include <bit>
#include <stdexcept>

#include "forge/asset_catalog.hpp"
#include "forge/image_io.hpp"
#include "forge/rng.hpp"
#include "json.hpp"

namespace forge {

namespace {

constexpr std::uint32_t kSvcwVersion = 1;
constexpr std::size_t kHeaderBytes = 24;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const std::string& in, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
    return v;
}

void put_values(std::string& out, const Matrix& m) {
    for (double v : m.data()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

Matrix get_matrix(const std::string& in, std::size_t& at, std::size_t rows, std::size_t cols) {
    std::vector<double> data(rows * cols);
    for (auto& v : data) {
        v = std::bit_cast<float>(get_u32(in, at));
        at += 4;
    }
    return Matrix(rows, cols, std::move(data));
}

std::string header(SvcwKind kind, std::size_t rows, std::size_t cols, std::size_t rank) {
    std::string out = "SVCW";
    put_u32(out, kSvcwVersion);
    put_u32(out, static_cast<std::uint32_t>(kind));
    put_u32(out, static_cast<std::uint32_t>(rows));
    put_u32(out, static_cast<std::uint32_t>(cols));
    put_u32(out, static_cast<std::uint32_t>(rank));
    return out;
}

Matrix random_matrix(RandomStream& rs, std::size_t rows, std::size_t cols, double scale) {
    Matrix m(rows, cols);
    for (double& v : m.data()) v = rs.uniform(-scale, scale);
    return to_float32(m);
}

nlohmann::json stats_json(const std::vector<double>& v) { return nlohmann::json(v); }

}  // namespace

Matrix to_float32(const Matrix& m) {
    Matrix out = m;
    for (double& v : out.data()) v = static_cast<float>(v);
    return out;
}

std::string encode_svcw(const Matrix& m) {
    std::string out = header(SvcwKind::matrix, m.rows(), m.cols(), 0);
    put_values(out, m);
    return out;
}

std::string encode_svcw(const LoraAdapter& ad) {
    if (ad.a.cols() != ad.b.rows()) throw ShapeError("adapter factors do not conform");
    std::string out = header(SvcwKind::adapter, ad.a.rows(), ad.b.cols(), ad.rank());
    put_values(out, ad.a);
    put_values(out, ad.b);
    return out;
}

SvcwFile decode_svcw(const std::string& bytes) {
    if (bytes.size() < kHeaderBytes || bytes.compare(0, 4, "SVCW") != 0) throw std::runtime_error("not an SVCW file");
    if (get_u32(bytes, 4) != kSvcwVersion) throw std::runtime_error("unsupported SVCW version");
    SvcwFile f;
    const std::uint32_t kind = get_u32(bytes, 8);
    const std::size_t rows = get_u32(bytes, 12), cols = get_u32(bytes, 16), rank = get_u32(bytes, 20);
    std::size_t at = kHeaderBytes;
    if (kind == 0) {
        if (bytes.size() != kHeaderBytes + 4 * rows * cols) throw std::runtime_error("SVCW matrix size mismatch");
        f.kind = SvcwKind::matrix;
        f.matrix = get_matrix(bytes, at, rows, cols);
    } else if (kind == 1) {
        if (bytes.size() != kHeaderBytes + 4 * (rows * rank + rank * cols))
            throw std::runtime_error("SVCW adapter size mismatch");
        f.kind = SvcwKind::adapter;
        f.adapter.a = get_matrix(bytes, at, rows, rank);
        f.adapter.b = get_matrix(bytes, at, rank, cols);
    } else {
        throw std::runtime_error("unknown SVCW kind " + std::to_string(kind));
    }
    return f;
}

void write_svcw(const std::filesystem::path& path, const Matrix& m) { write_bytes(path, encode_svcw(m)); }
void write_svcw(const std::filesystem::path& path, const LoraAdapter& ad) { write_bytes(path, encode_svcw(ad)); }
SvcwFile read_svcw(const std::filesystem::path& path) { return decode_svcw(read_file_bytes(path)); }

void export_kernel_fixtures(const std::filesystem::path& dir, std::uint64_t seed) {
    using nlohmann::json;
    std::filesystem::create_directories(dir);
    json doc = {{"format", "svcw-fixtures"}, {"version", 1}, {"tolerance", 1e-5}, {"seed", seed}};

    json lora = json::array();
    for (int k = 0; k < 3; ++k) {
        RandomStream rs(seed, {"fixture", "lora", k});
        const std::size_t m = 64, l = k == 2 ? 48 : 64, r = kDefaultLoraRank;
        const Matrix w = random_matrix(rs, m, l, 1.0);
        const LoraAdapter ad{random_matrix(rs, m, r, 0.1), random_matrix(rs, r, l, 0.1)};
        const Matrix out = lora_collapse(w, ad);
        const std::string base = "lora_" + std::to_string(k);
        write_svcw(dir / (base + "_w.svcw"), w);
        write_svcw(dir / (base + "_adapter.svcw"), ad);
        write_svcw(dir / (base + "_expected.svcw"), out);
        lora.push_back({{"weights", base + "_w.svcw"}, {"adapter", base + "_adapter.svcw"},
                        {"expected", base + "_expected.svcw"}});
    }
    doc["lora_collapse"] = lora;

    json avg = json::array();
    const double alphas[] = {0.0, 0.5, 1.0, 0.25};
    for (int k = 0; k < 4; ++k) {
        RandomStream rs(seed, {"fixture", "average", k});
        const Matrix src = random_matrix(rs, 32, 24, 2.0), ft = random_matrix(rs, 32, 24, 2.0);
        const std::string base = "avg_" + std::to_string(k);
        write_svcw(dir / (base + "_src.svcw"), src);
        write_svcw(dir / (base + "_ft.svcw"), ft);
        write_svcw(dir / (base + "_expected.svcw"), average_weights(src, ft, alphas[k]));
        avg.push_back({{"src", base + "_src.svcw"}, {"ft", base + "_ft.svcw"}, {"alpha", alphas[k]},
                       {"expected", base + "_expected.svcw"}});
    }
    doc["average_weights"] = avg;

    json adain = json::array();
    for (int k = 0; k < 2; ++k) {
        RandomStream rs(seed, {"fixture", "adain", k});
        const std::size_t c = 3, h = 16, w = 12;
        const Matrix content = random_matrix(rs, c, h * w, 1.0);
        Matrix style = random_matrix(rs, c, h * w, 1.0);
        for (std::size_t ch = 0; ch < c; ++ch)
            for (std::size_t i = 0; i < h * w; ++i) style(ch, i) = static_cast<float>(0.5 + 2.0 * style(ch, i));
        Tensor3 ct(c, h, w), st(c, h, w);
        std::copy(content.data().begin(), content.data().end(), ct.values.begin());
        std::copy(style.data().begin(), style.data().end(), st.values.begin());
        const Tensor3 out = adain_transfer(ct, st, kAdainAlpha);
        const ChannelStats os = channel_stats(out);
        const std::string base = "adain_" + std::to_string(k);
        write_svcw(dir / (base + "_content.svcw"), content);
        write_svcw(dir / (base + "_style.svcw"), style);
        write_svcw(dir / (base + "_expected.svcw"), Matrix(c, h * w, out.values));
        adain.push_back({{"content", base + "_content.svcw"},
                         {"style", base + "_style.svcw"},
                         {"shape", {c, h, w}},
                         {"alpha", kAdainAlpha},
                         {"sigma_floor", kAdainEpsilon},
                         {"expected", base + "_expected.svcw"},
                         {"expected_mean", stats_json(os.mean)},
                         {"expected_std", stats_json(os.stddev)}});
    }
    doc["adain_transfer"] = adain;

    json split = json::array();
    {
        std::string text = "This scene contains a large red oak table, a small white porcelain vase, and 2 humans.";
        text += " They are in a modern living room with wooden floors.";
        for (int i = 0; i < 24; ++i)
            text += i % 2 ? " A small white porcelain vase is to the right of the first person."
                          : " The second person is in front of a large red oak table.";
        text += " The first person walks forward. The first person wears a red plaid shirt.";
        for (std::size_t budget : {77u, 30u}) {
            split.push_back({{"text", text}, {"budget", budget}, {"tokenizer", "whitespace"},
                             {"chunks", split_caption(text, budget)}});
        }
    }
    doc["split_caption"] = split;

    write_bytes(dir / "fixtures.json", doc.dump(2) + "\n");
}

}  // namespace forge
