#include "switched/ncs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace switched {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

Mat closed_loop(const Plant& plant, const Mat& gain) {
    require(gain.rows() == plant.b.cols() && gain.cols() == plant.a.rows(),
            "gain dimensions must match the plant");
    return plant.a + plant.b * gain;
}

// [[tl, tr], [I, 0]] on the doubled state.
Mat augmented(const Mat& tl, const Mat& tr) {
    const int n = tl.rows();
    Mat m(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            m(i, j) = tl(i, j);
            m(i, n + j) = tr(i, j);
        }
        m(n + i, i) = 1.0;
    }
    return m;
}

}  // namespace

Plant::Plant(Mat a_in, Mat b_in) : a(std::move(a_in)), b(std::move(b_in)) {
    require(a.is_square(), "state matrix must be square");
    require(b.rows() == a.rows(), "input matrix row count must match the state dimension");
}

RatioBounds::RatioBounds(double lo, double hi) : lower(lo), upper(hi) {
    require(lo >= 0.0 && lo <= hi && hi <= 1.0, "ratio bounds must satisfy 0 <= lower <= upper <= 1");
}

std::pair<SwitchedSystem, ActivationBounds> delay_free_loop(const Plant& plant, const Mat& gain,
                                                            double failure_ratio) {
    require(failure_ratio >= 0.0 && failure_ratio <= 1.0, "failure ratio must lie in [0,1]");
    SwitchedSystem system({closed_loop(plant, gain), plant.a});
    ActivationBounds bounds({1.0 - failure_ratio, 0.0}, {1.0, failure_ratio});
    return {std::move(system), std::move(bounds)};
}

RatioBounds product_bounds(const RatioBounds& b1, const RatioBounds& b2) {
    return {std::max(0.0, b1.lower + b2.lower - 1.0), std::min(b1.upper, b2.upper)};
}

ActivationBounds two_channel_bounds(const RatioBounds& direct, const RatioBounds& delayed) {
    // Mode 1: direct delivered; mode 2: direct failed, delayed delivered;
    // mode 3: both failed.
    std::vector<double> lo(3), hi(3);
    lo[0] = 1.0 - direct.upper;
    hi[0] = 1.0 - direct.lower;
    lo[1] = std::max(0.0, direct.lower - delayed.upper);
    hi[1] = std::min(direct.upper, 1.0 - delayed.lower);
    lo[2] = std::max(0.0, direct.lower + delayed.lower - 1.0);
    hi[2] = std::min(direct.upper, delayed.upper);
    return ActivationBounds(std::move(lo), std::move(hi));
}

std::pair<SwitchedSystem, ActivationBounds> two_channel_loop(const Plant& plant,
                                                             const Mat& gain_direct,
                                                             const Mat& gain_delayed,
                                                             const RatioBounds& direct,
                                                             const RatioBounds& delayed) {
    const int n = plant.a.rows();
    const Mat zero(n, n);
    const Mat a1 = augmented(closed_loop(plant, gain_direct), zero);
    require(gain_delayed.rows() == plant.b.cols() && gain_delayed.cols() == n,
            "gain dimensions must match the plant");
    const Mat a2 = augmented(plant.a, plant.b * gain_delayed);
    const Mat a3 = augmented(plant.a, zero);
    return {SwitchedSystem({a1, a2, a3}), two_channel_bounds(direct, delayed)};
}

LyapunovCertificate::LyapunovCertificate(Mat p_in, double beta_in, double phi_in)
    : p(std::move(p_in)), beta(beta_in), phi(phi_in) {
    require(beta > 0.0 && beta < 1.0, "beta must lie in (0,1)");
    require(phi >= 1.0, "phi must be at least 1");
    if (!cholesky(p)) throw std::invalid_argument("P must be symmetric positive definite");
}

bool check_lyapunov(const LyapunovCertificate& cert, const Plant& plant, const Mat& gain,
                    double failure_ratio) {
    require(failure_ratio >= 0.0 && failure_ratio <= 1.0, "failure ratio must lie in [0,1]");
    const Mat acl = closed_loop(plant, gain);
    const Mat m1 = cert.beta * cert.p - transpose(acl) * cert.p * acl;
    const Mat m2 = cert.phi * cert.p - transpose(plant.a) * cert.p * plant.a;
    constexpr double kEigenSlack = -1e-9;
    if (symmetric_eigenvalues(m1).front() < kEigenSlack) return false;
    if (symmetric_eigenvalues(m2).front() < kEigenSlack) return false;
    return (1.0 - failure_ratio) * std::log(cert.beta) + failure_ratio * std::log(cert.phi) < 0.0;
}

bool lyapunov_implies_certificate(const LyapunovCertificate& cert, const Plant& plant,
                                  const Mat& gain, double failure_ratio) {
    require(check_lyapunov(cert, plant, gain, failure_ratio),
            "certificate does not pass the Lyapunov comparison test");
    const auto [system, bounds] = delay_free_loop(plant, gain, failure_ratio);
    const StabilityCertificate sc =
        certify(system, bounds, 1, Norm::weighted(cert.p), std::sqrt(cert.beta));
    return sc.verdict == Verdict::CertifiedStable;
}

}  // namespace switched
