#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace forge {

class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Dense row-major matrix of finite reals.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

using WeightMatrix = Matrix;
using Embedding = std::vector<double>;

Matrix matmul(const Matrix& a, const Matrix& b);
std::vector<double> matvec(const Matrix& m, std::span<const double> x);

/// Rank-r residual adapter: W* = W + A·B with A m×r and B r×l.
struct LoraAdapter {
    Matrix a;
    Matrix b;
    std::size_t rank() const { return a.cols(); }
};

inline constexpr std::size_t kDefaultLoraRank = 16;

double similarity(std::span<const double> text, std::span<const double> image);

Matrix lora_collapse(const Matrix& w, const LoraAdapter& adapter);
/// W·x + A·(B·x), never forming A·B.
std::vector<double> lora_apply(const Matrix& w, const LoraAdapter& adapter, std::span<const double> x);
std::size_t adapter_param_count(std::span<const std::pair<std::size_t, std::size_t>> shapes, std::size_t rank);

/// alpha·src + (1−alpha)·ft; alpha weighs the pre-finetune (source) model.
Matrix average_weights(const Matrix& src, const Matrix& ft, double alpha);

using TokenCounter = std::function<std::size_t(std::string_view)>;
std::size_t whitespace_token_count(std::string_view text);
std::string normalize_whitespace(std::string_view text);
/// Sentences end at '.', '?' or '!' (followed by whitespace or end of text).
std::vector<std::string> split_sentences(std::string_view text);

class BudgetError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Greedy left-to-right packing of whole sentences into chunks of at most `budget` tokens.
std::vector<std::string> split_caption(std::string_view text, std::size_t budget,
                                       const TokenCounter& count = whitespace_token_count);

struct TextEncoder {
    std::function<Embedding(std::string_view)> encode;
    std::size_t context_budget = 77;
    TokenCounter count_tokens = whitespace_token_count;
};

/// Plain mean of the sub-caption embeddings (not re-normalized).
Embedding split_encode(std::string_view text, const TextEncoder& encoder);

/// C×H×W tensor, channel-major.
struct Tensor3 {
    std::size_t channels = 0, height = 0, width = 0;
    std::vector<double> values;

    Tensor3() = default;
    Tensor3(std::size_t c, std::size_t h, std::size_t w, double fill = 0.0)
        : channels(c), height(h), width(w), values(c * h * w, fill) {}
    std::size_t plane() const { return height * width; }
    std::span<double> channel(std::size_t c) { return {values.data() + c * plane(), plane()}; }
    std::span<const double> channel(std::size_t c) const { return {values.data() + c * plane(), plane()}; }
};

struct ChannelStats {
    std::vector<double> mean;
    std::vector<double> stddev;  // population
};

ChannelStats channel_stats(const Tensor3& t);

inline constexpr double kAdainEpsilon = 1e-6;
inline constexpr double kAdainAlpha = 0.5;
inline constexpr double kEigenFloor = 1e-8;

/// alpha·AdaIN(content, style) + (1−alpha)·content, per channel. Content σ is floored at kAdainEpsilon.
Tensor3 adain_transfer(const Tensor3& content, const Tensor3& style, double alpha = kAdainAlpha);

/// Whitening-colouring transform of `style` so its channel mean and 3×3 covariance match `content`.
Tensor3 match_color_distribution(const Tensor3& style, const Tensor3& content);

}  // namespace forge
