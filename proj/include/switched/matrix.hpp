#pragma once

#include <initializer_list>
#include <optional>
#include <vector>

namespace switched {

/// Dense real matrix, row-major. Entries are validated to be finite on
/// construction and after every arithmetic operation that could overflow.
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols);  // zero-filled
    Mat(int rows, int cols, std::vector<double> entries);
    Mat(std::initializer_list<std::initializer_list<double>> rows);

    static Mat identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int r, int c) { return entries_[static_cast<std::size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return entries_[static_cast<std::size_t>(r) * cols_ + c]; }

    bool is_square() const { return rows_ == cols_; }
    /// True iff every entry is exactly 0.0.
    bool is_zero() const;

    const std::vector<double>& data() const { return entries_; }
    std::vector<double>& data() { return entries_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> entries_;
};

bool operator==(const Mat& a, const Mat& b);  // exact entrywise comparison

Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Mat operator*(const Mat& a, const Mat& b);
Mat operator*(double s, const Mat& a);
Mat transpose(const Mat& a);

/// c = a*b without allocating; c must be preshaped to a.rows x b.cols and
/// must not alias a or b.
void mat_mul_into(const Mat& a, const Mat& b, Mat& c);

enum class NormKind { One, Inf, Spectral, Frobenius, Weighted };

/// A submultiplicative matrix norm. One/Inf/Spectral/Weighted are induced
/// norms; Frobenius is included for cross-checking published values.
struct Norm {
    NormKind kind = NormKind::Spectral;
    std::optional<Mat> weight;  // SPD matrix, present iff kind == Weighted

    static Norm one() { return {NormKind::One, std::nullopt}; }
    static Norm inf() { return {NormKind::Inf, std::nullopt}; }
    static Norm spectral() { return {NormKind::Spectral, std::nullopt}; }
    static Norm frobenius() { return {NormKind::Frobenius, std::nullopt}; }
    static Norm weighted(Mat p);
};

double mat_norm(const Mat& m, const Norm& norm);

/// Magnitude of the largest-magnitude eigenvalue. Hessenberg reduction
/// followed by Francis double-shift QR; dimensions up to 64.
double spectral_radius(const Mat& m);

/// Lower-triangular L with p = L*L^T, or nullopt when p is not symmetric
/// positive definite (pivot < 1e-12 * max diagonal counts as failure).
std::optional<Mat> cholesky(const Mat& p);

/// All eigenvalues of a symmetric matrix, ascending. Cyclic Jacobi with
/// off-diagonal threshold 1e-14 relative to the matrix scale; n <= 64.
std::vector<double> symmetric_eigenvalues(const Mat& s);

/// Solves a*x = b for square a via partial-pivot LU. Throws on singular a.
Mat solve_linear(Mat a, Mat b);

}  // namespace switched
