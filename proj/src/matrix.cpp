#include "switched/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace switched {

namespace {

constexpr int kMaxEigenDim = 64;

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

void check_finite(const std::vector<double>& entries) {
    for (double v : entries) {
        if (!std::isfinite(v)) throw std::invalid_argument("matrix entry is not finite");
    }
}

}  // namespace

Mat::Mat(int rows, int cols) : rows_(rows), cols_(cols) {
    require(rows > 0 && cols > 0, "matrix dimensions must be positive");
    entries_.assign(static_cast<std::size_t>(rows) * cols, 0.0);
}

Mat::Mat(int rows, int cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    require(rows > 0 && cols > 0, "matrix dimensions must be positive");
    require(entries_.size() == static_cast<std::size_t>(rows) * cols,
            "entry count does not match dimensions");
    check_finite(entries_);
}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = static_cast<int>(rows.size());
    require(rows_ > 0, "matrix dimensions must be positive");
    cols_ = static_cast<int>(rows.begin()->size());
    require(cols_ > 0, "matrix dimensions must be positive");
    entries_.reserve(static_cast<std::size_t>(rows_) * cols_);
    for (const auto& row : rows) {
        require(static_cast<int>(row.size()) == cols_, "ragged initializer rows");
        entries_.insert(entries_.end(), row.begin(), row.end());
    }
    check_finite(entries_);
}

Mat Mat::identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool Mat::is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(), [](double v) { return v == 0.0; });
}

bool operator==(const Mat& a, const Mat& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && a.data() == b.data();
}

Mat operator+(const Mat& a, const Mat& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "dimension mismatch in matrix sum");
    Mat c = a;
    for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] += b.data()[i];
    check_finite(c.data());
    return c;
}

Mat operator-(const Mat& a, const Mat& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "dimension mismatch in matrix difference");
    Mat c = a;
    for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] -= b.data()[i];
    check_finite(c.data());
    return c;
}

void mat_mul_into(const Mat& a, const Mat& b, Mat& c) {
    const int n = a.rows(), k = a.cols(), m = b.cols();
    // Fixed i-k-j loop order: the summation order never depends on the call site.
    std::fill(c.data().begin(), c.data().end(), 0.0);
    const double* pa = a.data().data();
    const double* pb = b.data().data();
    double* pc = c.data().data();
    for (int i = 0; i < n; ++i) {
        for (int kk = 0; kk < k; ++kk) {
            const double aik = pa[static_cast<std::size_t>(i) * k + kk];
            if (aik == 0.0) continue;
            const double* brow = pb + static_cast<std::size_t>(kk) * m;
            double* crow = pc + static_cast<std::size_t>(i) * m;
            for (int j = 0; j < m; ++j) crow[j] += aik * brow[j];
        }
    }
}

Mat operator*(const Mat& a, const Mat& b) {
    require(a.cols() == b.rows(), "dimension mismatch in matrix product");
    Mat c(a.rows(), b.cols());
    mat_mul_into(a, b, c);
    check_finite(c.data());
    return c;
}

Mat operator*(double s, const Mat& a) {
    Mat c = a;
    for (double& v : c.data()) v *= s;
    check_finite(c.data());
    return c;
}

Mat transpose(const Mat& a) {
    Mat t(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Norm Norm::weighted(Mat p) {
    require(p.is_square(), "weight matrix must be square");
    if (!cholesky(p)) throw std::invalid_argument("weight matrix must be symmetric positive definite");
    Norm n;
    n.kind = NormKind::Weighted;
    n.weight = std::move(p);
    return n;
}

std::optional<Mat> cholesky(const Mat& p) {
    if (!p.is_square()) return std::nullopt;
    const int n = p.rows();
    double max_diag = 0.0;
    for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(p(i, i)));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(p(i, j) - p(j, i)) > 1e-10 * std::max(1.0, max_diag)) return std::nullopt;

    Mat l(n, n);
    for (int j = 0; j < n; ++j) {
        double d = p(j, j);
        for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (d < 1e-12 * std::max(max_diag, 1e-300)) return std::nullopt;
        l(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double v = p(i, j);
            for (int k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
            l(i, j) = v / l(j, j);
        }
    }
    return l;
}

namespace {

// Largest eigenvalue of a symmetric matrix via cyclic Jacobi.
std::vector<double> jacobi_eigenvalues(Mat s) {
    const int n = s.rows();
    double scale = 0.0;
    for (double v : s.data()) scale += v * v;
    scale = std::sqrt(scale);
    const double thresh = 1e-14 * std::max(scale, 1e-300);

    for (int sweep = 0; sweep < 100; ++sweep) {
        bool rotated = false;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = s(p, q);
                if (std::abs(apq) <= thresh) continue;
                rotated = true;
                const double theta = (s(q, q) - s(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (int k = 0; k < n; ++k) {
                    const double skp = s(k, p), skq = s(k, q);
                    s(k, p) = c * skp - sn * skq;
                    s(k, q) = sn * skp + c * skq;
                }
                for (int k = 0; k < n; ++k) {
                    const double spk = s(p, k), sqk = s(q, k);
                    s(p, k) = c * spk - sn * sqk;
                    s(q, k) = sn * spk + c * sqk;
                }
            }
        }
        if (!rotated) break;
    }
    std::vector<double> eig(n);
    for (int i = 0; i < n; ++i) eig[i] = s(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

double largest_singular_value(const Mat& m) {
    // sqrt of the largest eigenvalue of m^T m (symmetrized against rounding)
    Mat g = transpose(m) * m;
    for (int i = 0; i < g.rows(); ++i)
        for (int j = i + 1; j < g.cols(); ++j) {
            const double v = 0.5 * (g(i, j) + g(j, i));
            g(i, j) = g(j, i) = v;
        }
    const std::vector<double> eig = jacobi_eigenvalues(std::move(g));
    return std::sqrt(std::max(eig.back(), 0.0));
}

// Row i of x solves L^T-system; returns m * L^{-T} given lower-triangular l.
Mat right_solve_lower_transposed(const Mat& m, const Mat& l) {
    const int n = l.rows();
    Mat x = m;
    // x * l^T = m  <=>  l * x^T = m^T; forward substitution per row of x.
    for (int r = 0; r < x.rows(); ++r) {
        for (int j = 0; j < n; ++j) {
            double v = x(r, j);
            for (int k = 0; k < j; ++k) v -= l(j, k) * x(r, k);
            x(r, j) = v / l(j, j);
        }
    }
    return x;
}

}  // namespace

std::vector<double> symmetric_eigenvalues(const Mat& s) {
    require(s.is_square(), "eigenvalues require a square matrix");
    require(s.rows() <= kMaxEigenDim, "dimension above 64 is unsupported");
    Mat a = s;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = i + 1; j < a.cols(); ++j) {
            const double v = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = a(j, i) = v;
        }
    return jacobi_eigenvalues(std::move(a));
}

double mat_norm(const Mat& m, const Norm& norm) {
    switch (norm.kind) {
        case NormKind::One: {
            double best = 0.0;
            for (int j = 0; j < m.cols(); ++j) {
                double s = 0.0;
                for (int i = 0; i < m.rows(); ++i) s += std::abs(m(i, j));
                best = std::max(best, s);
            }
            return best;
        }
        case NormKind::Inf: {
            double best = 0.0;
            for (int i = 0; i < m.rows(); ++i) {
                double s = 0.0;
                for (int j = 0; j < m.cols(); ++j) s += std::abs(m(i, j));
                best = std::max(best, s);
            }
            return best;
        }
        case NormKind::Frobenius: {
            double s = 0.0;
            for (double v : m.data()) s += v * v;
            return std::sqrt(s);
        }
        case NormKind::Spectral:
            require(m.rows() <= kMaxEigenDim && m.cols() <= kMaxEigenDim,
                    "dimension above 64 is unsupported");
            return largest_singular_value(m);
        case NormKind::Weighted: {
            require(norm.weight.has_value(), "weighted norm requires a weight matrix");
            require(m.is_square(), "weighted norm requires a square matrix");
            require(norm.weight->rows() == m.rows(), "weight dimension mismatch");
            const std::optional<Mat> l = cholesky(*norm.weight);
            if (!l) throw std::invalid_argument("weight matrix must be symmetric positive definite");
            // ||m||_P = ||L^T m L^{-T}||_2 with P = L L^T
            return largest_singular_value(right_solve_lower_transposed(transpose(*l) * m, *l));
        }
    }
    throw std::logic_error("unknown norm kind");
}

namespace {

// Reduce to upper Hessenberg form in place (Householder reflectors).
void hessenberg(Mat& h) {
    const int n = h.rows();
    std::vector<double> v(n);
    for (int k = 0; k < n - 2; ++k) {
        double scale = 0.0;
        for (int i = k + 1; i < n; ++i) scale += h(i, k) * h(i, k);
        scale = std::sqrt(scale);
        if (scale == 0.0) continue;
        double alpha = h(k + 1, k) >= 0.0 ? -scale : scale;
        double vnorm2 = 0.0;
        for (int i = k + 1; i < n; ++i) {
            v[i] = h(i, k);
            if (i == k + 1) v[i] -= alpha;
            vnorm2 += v[i] * v[i];
        }
        if (vnorm2 == 0.0) continue;
        // H <- (I - 2vv^T/v^Tv) H (I - 2vv^T/v^Tv)
        for (int j = 0; j < n; ++j) {
            double dot = 0.0;
            for (int i = k + 1; i < n; ++i) dot += v[i] * h(i, j);
            dot = 2.0 * dot / vnorm2;
            for (int i = k + 1; i < n; ++i) h(i, j) -= dot * v[i];
        }
        for (int i = 0; i < n; ++i) {
            double dot = 0.0;
            for (int j = k + 1; j < n; ++j) dot += h(i, j) * v[j];
            dot = 2.0 * dot / vnorm2;
            for (int j = k + 1; j < n; ++j) h(i, j) -= dot * v[j];
        }
        h(k + 1, k) = alpha;
        for (int i = k + 2; i < n; ++i) h(i, k) = 0.0;
    }
}

double two_by_two_radius(double a, double b, double c, double d) {
    const double mid = 0.5 * (a + d);
    const double det = a * d - b * c;
    const double disc = mid * mid - det;
    if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        return std::max(std::abs(mid + r), std::abs(mid - r));
    }
    return std::sqrt(det);  // complex pair: |lambda|^2 = det
}

}  // namespace

double spectral_radius(const Mat& m) {
    require(m.is_square(), "spectral radius requires a square matrix");
    const int n = m.rows();
    require(n <= kMaxEigenDim, "dimension above 64 is unsupported");
    if (n == 1) return std::abs(m(0, 0));
    if (m.is_zero()) return 0.0;

    Mat h = m;
    hessenberg(h);

    const double eps = 1e-13;
    double radius = 0.0;
    int hi = n - 1;
    int since_deflation = 0;

    while (hi >= 0) {
        if (hi == 0) {
            radius = std::max(radius, std::abs(h(0, 0)));
            break;
        }
        // Negligible subdiagonal entries split the active window.
        for (int i = hi; i >= 1; --i) {
            if (std::abs(h(i, i - 1)) <= eps * (std::abs(h(i - 1, i - 1)) + std::abs(h(i, i)))) {
                h(i, i - 1) = 0.0;
            }
        }
        if (h(hi, hi - 1) == 0.0) {
            radius = std::max(radius, std::abs(h(hi, hi)));
            --hi;
            since_deflation = 0;
            continue;
        }
        if (hi == 1 || h(hi - 1, hi - 2) == 0.0) {
            radius = std::max(radius,
                              two_by_two_radius(h(hi - 1, hi - 1), h(hi - 1, hi),
                                                h(hi, hi - 1), h(hi, hi)));
            hi -= 2;
            since_deflation = 0;
            continue;
        }
        // Start of the unreduced block ending at hi.
        int lo = hi - 1;
        while (lo > 0 && h(lo, lo - 1) != 0.0) --lo;

        if (++since_deflation > 30 * n) {
            throw std::runtime_error("QR eigenvalue iteration failed to converge");
        }

        // Francis double shift from the trailing 2x2; exceptional shift
        // every 10 stalled iterations.
        double s, t;
        if (since_deflation % 10 == 0) {
            const double w = std::abs(h(hi, hi - 1)) + std::abs(h(hi - 1, hi - 2));
            s = 2.0 * w;
            t = w * w;
        } else {
            s = h(hi - 1, hi - 1) + h(hi, hi);
            t = h(hi - 1, hi - 1) * h(hi, hi) - h(hi - 1, hi) * h(hi, hi - 1);
        }
        double x = h(lo, lo) * h(lo, lo) + h(lo, lo + 1) * h(lo + 1, lo) - s * h(lo, lo) + t;
        double y = h(lo + 1, lo) * (h(lo, lo) + h(lo + 1, lo + 1) - s);
        double z = h(lo + 2, lo + 1) * h(lo + 1, lo);

        for (int k = lo; k <= hi - 2; ++k) {
            // Householder reflector for [x y z]^T
            const double col_scale = std::abs(x) + std::abs(y) + std::abs(z);
            if (col_scale != 0.0) {
                const double xs = x / col_scale, ys = y / col_scale, zs = z / col_scale;
                double alpha = std::sqrt(xs * xs + ys * ys + zs * zs);
                if (xs > 0.0) alpha = -alpha;
                const double v0 = xs - alpha, v1 = ys, v2 = zs;
                const double vnorm2 = v0 * v0 + v1 * v1 + v2 * v2;
                if (vnorm2 > 0.0) {
                    const int r0 = k, r1 = k + 1, r2 = k + 2;
                    const int jstart = std::max(lo, k - 1);
                    for (int j = jstart; j < n; ++j) {
                        double dot = v0 * h(r0, j) + v1 * h(r1, j) + v2 * h(r2, j);
                        dot = 2.0 * dot / vnorm2;
                        h(r0, j) -= dot * v0;
                        h(r1, j) -= dot * v1;
                        h(r2, j) -= dot * v2;
                    }
                    const int iend = std::min(hi, k + 3);
                    for (int i = 0; i <= iend; ++i) {
                        double dot = v0 * h(i, r0) + v1 * h(i, r1) + v2 * h(i, r2);
                        dot = 2.0 * dot / vnorm2;
                        h(i, r0) -= dot * v0;
                        h(i, r1) -= dot * v1;
                        h(i, r2) -= dot * v2;
                    }
                }
            }
            x = h(k + 1, k);
            y = h(k + 2, k);
            z = (k + 3 <= hi) ? h(k + 3, k) : 0.0;
        }
        // Final 2-element reflector for the bulge tail.
        {
            const double col_scale = std::abs(x) + std::abs(y);
            if (col_scale != 0.0) {
                const double xs = x / col_scale, ys = y / col_scale;
                double alpha = std::sqrt(xs * xs + ys * ys);
                if (xs > 0.0) alpha = -alpha;
                const double v0 = xs - alpha, v1 = ys;
                const double vnorm2 = v0 * v0 + v1 * v1;
                if (vnorm2 > 0.0) {
                    const int r0 = hi - 1, r1 = hi;
                    for (int j = hi - 2; j < n; ++j) {
                        double dot = v0 * h(r0, j) + v1 * h(r1, j);
                        dot = 2.0 * dot / vnorm2;
                        h(r0, j) -= dot * v0;
                        h(r1, j) -= dot * v1;
                    }
                    for (int i = 0; i <= hi; ++i) {
                        double dot = v0 * h(i, r0) + v1 * h(i, r1);
                        dot = 2.0 * dot / vnorm2;
                        h(i, r0) -= dot * v0;
                        h(i, r1) -= dot * v1;
                    }
                }
            }
        }
    }
    return radius;
}

Mat solve_linear(Mat a, Mat b) {
    if (!a.is_square() || a.rows() != b.rows()) {
        throw std::invalid_argument("solve_linear requires square a with matching rhs");
    }
    const int n = a.rows(), m = b.cols();
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (std::abs(a(piv, k)) < 1e-300) throw std::runtime_error("singular linear system");
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            for (int j = 0; j < m; ++j) std::swap(b(k, j), b(piv, j));
        }
        for (int i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            if (f == 0.0) continue;
            for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            for (int j = 0; j < m; ++j) b(i, j) -= f * b(k, j);
        }
    }
    for (int k = n - 1; k >= 0; --k) {
        for (int j = 0; j < m; ++j) {
            double v = b(k, j);
            for (int i = k + 1; i < n; ++i) v -= a(k, i) * b(i, j);
            b(k, j) = v / a(k, k);
        }
    }
    return b;
}

}  // namespace switched
