#include "forge/finetune_kernels.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

namespace forge {

namespace {

void require_finite(std::span<const double> v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + " contains non-finite entries");
}

std::string shape_text(const Matrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

bool sentence_end(char c) { return c == '.' || c == '?' || c == '!'; }

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) throw ShapeError("matrix data size does not match shape");
    require_finite(data_, "matrix");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw ShapeError("matmul: " + shape_text(a) + " times " + shape_text(b));
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

std::vector<double> matvec(const Matrix& m, std::span<const double> x) {
    if (m.cols() != x.size()) throw ShapeError("matvec: " + shape_text(m) + " times vector of " + std::to_string(x.size()));
    std::vector<double> out(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * x[j];
        out[i] = s;
    }
    return out;
}

double similarity(std::span<const double> text, std::span<const double> image) {
    if (text.size() != image.size()) throw ShapeError("similarity: embedding dimensions differ");
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        ab += text[i] * image[i];
        aa += text[i] * text[i];
        bb += image[i] * image[i];
    }
    if (aa == 0 || bb == 0) throw std::invalid_argument("similarity: zero vector");
    return std::clamp(ab / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

static void check_adapter(const Matrix& w, const LoraAdapter& ad) {
    if (ad.a.rows() != w.rows() || ad.b.cols() != w.cols() || ad.a.cols() != ad.b.rows())
        throw ShapeError("adapter A " + shape_text(ad.a) + ", B " + shape_text(ad.b) + " do not conform to W " +
                         shape_text(w));
    if (ad.rank() < 1 || ad.rank() > std::min(w.rows(), w.cols()))
        throw ShapeError("adapter rank " + std::to_string(ad.rank()) + " outside [1, min(m,l)]");
}

Matrix lora_collapse(const Matrix& w, const LoraAdapter& adapter) {
    check_adapter(w, adapter);
    Matrix out = w;
    const Matrix delta = matmul(adapter.a, adapter.b);
    auto o = out.data();
    auto d = delta.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += d[i];
    return out;
}

std::vector<double> lora_apply(const Matrix& w, const LoraAdapter& adapter, std::span<const double> x) {
    check_adapter(w, adapter);
    std::vector<double> y = matvec(w, x);
    const std::vector<double> bx = matvec(adapter.b, x);
    const std::vector<double> abx = matvec(adapter.a, bx);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += abx[i];
    return y;
}

std::size_t adapter_param_count(std::span<const std::pair<std::size_t, std::size_t>> shapes, std::size_t rank) {
    if (rank < 1) throw std::invalid_argument("adapter rank must be >= 1");
    std::size_t total = 0;
    for (const auto& [m, l] : shapes) total += rank * (m + l);
    return total;
}

Matrix average_weights(const Matrix& src, const Matrix& ft, double alpha) {
    if (src.rows() != ft.rows() || src.cols() != ft.cols())
        throw ShapeError("average_weights: " + shape_text(src) + " vs " + shape_text(ft));
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("average_weights: alpha outside [0,1]");
    if (alpha == 1.0) return src;
    if (alpha == 0.0) return ft;
    Matrix out(src.rows(), src.cols());
    auto o = out.data();
    auto s = src.data();
    auto f = ft.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = alpha * s[i] + (1.0 - alpha) * f[i];
    return out;
}

std::size_t whitespace_token_count(std::string_view text) {
    std::size_t n = 0;
    bool in_word = false;
    for (char c : text) {
        const bool space = std::isspace(static_cast<unsigned char>(c));
        if (!space && !in_word) ++n;
        in_word = !space;
    }
    return n;
}

std::string normalize_whitespace(std::string_view text) {
    std::string out;
    bool pending_space = false;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out += ' ';
        pending_space = false;
        out += c;
    }
    return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
    const std::string norm = normalize_whitespace(text);
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < norm.size(); ++i) {
        if (!sentence_end(norm[i])) continue;
        if (i + 1 < norm.size() && norm[i + 1] != ' ') continue;  // e.g. "3.5" or "t-shirt."
        out.push_back(norm.substr(start, i + 1 - start));
        start = i + 2;
    }
    if (start < norm.size()) out.push_back(norm.substr(start));
    return out;
}

std::vector<std::string> split_caption(std::string_view text, std::size_t budget, const TokenCounter& count) {
    std::vector<std::string> chunks;
    std::string current;
    for (auto& sentence : split_sentences(text)) {
        if (count(sentence) > budget)
            throw BudgetError("sentence of " + std::to_string(count(sentence)) + " tokens exceeds budget " +
                              std::to_string(budget) + ": \"" + sentence + "\"");
        if (current.empty()) {
            current = std::move(sentence);
            continue;
        }
        std::string candidate = current + " " + sentence;
        if (count(candidate) <= budget) {
            current = std::move(candidate);
        } else {
            chunks.push_back(std::move(current));
            current = std::move(sentence);
        }
    }
    if (!current.empty()) chunks.push_back(std::move(current));
    return chunks;
}

Embedding split_encode(std::string_view text, const TextEncoder& encoder) {
    const auto chunks = split_caption(text, encoder.context_budget, encoder.count_tokens);
    if (chunks.size() <= 1) return encoder.encode(text);
    Embedding mean;
    for (const auto& chunk : chunks) {
        const Embedding e = encoder.encode(chunk);
        if (mean.empty()) mean.assign(e.size(), 0.0);
        if (e.size() != mean.size()) throw ShapeError("encoder returned embeddings of differing dimension");
        for (std::size_t i = 0; i < e.size(); ++i) mean[i] += e[i];
    }
    for (double& v : mean) v /= static_cast<double>(chunks.size());
    return mean;
}

ChannelStats channel_stats(const Tensor3& t) {
    ChannelStats s;
    const double n = static_cast<double>(t.plane());
    for (std::size_t c = 0; c < t.channels; ++c) {
        const auto ch = t.channel(c);
        const double mu = std::accumulate(ch.begin(), ch.end(), 0.0) / n;
        double var = 0;
        for (double v : ch) var += (v - mu) * (v - mu);
        s.mean.push_back(mu);
        s.stddev.push_back(std::sqrt(var / n));
    }
    return s;
}

Tensor3 adain_transfer(const Tensor3& content, const Tensor3& style, double alpha) {
    if (content.channels != style.channels) throw ShapeError("adain_transfer: channel counts differ");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("adain_transfer: alpha outside [0,1]");
    if (alpha == 0.0) return content;
    const ChannelStats cs = channel_stats(content), ss = channel_stats(style);
    Tensor3 out = content;
    for (std::size_t c = 0; c < content.channels; ++c) {
        const double gain = ss.stddev[c] / std::max(cs.stddev[c], kAdainEpsilon);
        for (double& v : out.channel(c)) {
            const double stylized = gain * (v - cs.mean[c]) + ss.mean[c];
            v = alpha * stylized + (1.0 - alpha) * v;
        }
    }
    return out;
}

namespace {

struct ColorMoments {
    Eigen::Vector3d mean;
    Eigen::Matrix3d cov;
};

ColorMoments color_moments(const Tensor3& t) {
    ColorMoments m;
    const double n = static_cast<double>(t.plane());
    for (int c = 0; c < 3; ++c) {
        const auto ch = t.channel(static_cast<std::size_t>(c));
        m.mean(c) = std::accumulate(ch.begin(), ch.end(), 0.0) / n;
    }
    m.cov.setZero();
    for (std::size_t i = 0; i < t.plane(); ++i) {
        const Eigen::Vector3d d(t.values[i] - m.mean(0), t.values[t.plane() + i] - m.mean(1),
                                t.values[2 * t.plane() + i] - m.mean(2));
        m.cov += d * d.transpose();
    }
    m.cov /= n;
    return m;
}

Eigen::Matrix3d symmetric_power(const Eigen::Matrix3d& s, double power) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(s);
    Eigen::Vector3d vals = eig.eigenvalues().cwiseMax(kEigenFloor);
    for (int i = 0; i < 3; ++i) vals(i) = std::pow(vals(i), power);
    return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

Tensor3 match_color_distribution(const Tensor3& style, const Tensor3& content) {
    if (style.channels != 3 || content.channels != 3)
        throw ShapeError("match_color_distribution expects 3-channel images");
    const ColorMoments sm = color_moments(style), cm = color_moments(content);
    const Eigen::Matrix3d transform = symmetric_power(cm.cov, 0.5) * symmetric_power(sm.cov, -0.5);
    Tensor3 out = style;
    const std::size_t n = style.plane();
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector3d d(style.values[i] - sm.mean(0), style.values[n + i] - sm.mean(1),
                                style.values[2 * n + i] - sm.mean(2));
        const Eigen::Vector3d v = transform * d + cm.mean;
        out.values[i] = v(0);
        out.values[n + i] = v(1);
        out.values[2 * n + i] = v(2);
    }
    return out;
}

}  // namespace forge
