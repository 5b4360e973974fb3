#pragma once

#include <utility>

#include "switched/certify.hpp"
#include "switched/matrix.hpp"
#include "switched/system.hpp"

namespace switched {

/// x~(t+1) = A x~(t) + B u(t).
struct Plant {
    Mat a;
    Mat b;
    Plant(Mat a_in, Mat b_in);
};

/// Lower/upper bounds on the long-run average of a binary failure process.
struct RatioBounds {
    double lower = 0.0;
    double upper = 1.0;
    RatioBounds(double lo, double hi);
};

/// Closed loop over one lossy channel: mode 1 = A + B K (exchange succeeded),
/// mode 2 = A (packet lost, zero input); activation bounds
/// (1-rho, 1) and (0, rho).
std::pair<SwitchedSystem, ActivationBounds> delay_free_loop(const Plant& plant, const Mat& gain,
                                                            double failure_ratio);

/// Ratio bounds for the product of two binary processes:
/// lower max{0, l1+l2-1}, upper min{u1, u2}.
RatioBounds product_bounds(const RatioBounds& b1, const RatioBounds& b2);

/// Activation bounds of the 3-mode loop from per-channel failure bounds
/// (direct = delay-free channel, delayed = one-step-delayed channel).
ActivationBounds two_channel_bounds(const RatioBounds& direct, const RatioBounds& delayed);

/// Closed loop over a delay-free and a one-step-delayed channel on the
/// augmented state [x~(t+1); x~(t)], with u(0) = 0:
///   mode 1 = [[A+B K_N, 0], [I, 0]]   direct channel delivered
///   mode 2 = [[A, B K_D], [I, 0]]     only the delayed channel delivered
///   mode 3 = [[A, 0], [I, 0]]         both channels failed
std::pair<SwitchedSystem, ActivationBounds> two_channel_loop(const Plant& plant,
                                                             const Mat& gain_direct,
                                                             const Mat& gain_delayed,
                                                             const RatioBounds& direct,
                                                             const RatioBounds& delayed);

/// Certificate for the per-step Lyapunov comparison test:
/// beta P - (A+BK)^T P (A+BK) >= 0, phi P - A^T P A >= 0 and
/// (1-rho) ln beta + rho ln phi < 0.
struct LyapunovCertificate {
    Mat p;
    double beta;  // in (0,1)
    double phi;   // >= 1
    LyapunovCertificate(Mat p_in, double beta_in, double phi_in);
};

/// True iff both matrix inequalities hold (minimum eigenvalue >= -1e-9) and
/// the scalar inequality holds at the given failure ratio.
bool check_lyapunov(const LyapunovCertificate& cert, const Plant& plant, const Mat& gain,
                    double failure_ratio);

/// Re-certifies a passing Lyapunov certificate through the h = 1 program
/// with the P-weighted norm and epsilon = sqrt(beta); returns whether the
/// verdict is CertifiedStable.
bool lyapunov_implies_certificate(const LyapunovCertificate& cert, const Plant& plant,
                                  const Mat& gain, double failure_ratio);

}  // namespace switched
