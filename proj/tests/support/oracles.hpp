// oracles.hpp — independent reference computations used only by tests.
//
// The adaptive Simpson integrator here is deliberately a different algorithm
// from the library's Gauss-Kronrod routine, so quadrature-backed expectations
// are checked through an independent path.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>

namespace testsupport {

inline double simpson_step(const std::function<double(double)>& f, double a, double b,
                           double fa, double fm, double fb, double whole, double tol,
                           int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// panel-seeded adaptive Simpson with a relative tolerance; the fixed initial
// subdivision keeps narrow features from being skipped by the 3-point probe
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double rel_tol = 1e-13) {
    const int panels = 64;
    const double h = (b - a) / panels;
    double rough = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double pa = a + i * h, pm = pa + 0.5 * h, pb = pa + h;
        rough += h / 6.0 * (std::abs(f(pa)) + 4.0 * std::abs(f(pm)) + std::abs(f(pb)));
    }
    const double tol = rel_tol * (rough > 0.0 ? rough : 1.0) / panels;
    double total = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double pa = a + i * h, pb = pa + h, pm = 0.5 * (pa + pb);
        const double fa = f(pa), fm = f(pm), fb = f(pb);
        const double whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
        total += simpson_step(f, pa, pb, fa, fm, fb, whole, tol, 28);
    }
    return total;
}

// frozen oracle values for the default parameters (omega_q = omega_c = 2*pi*5
// rad/ns, alpha = 0.03), computed with the integrator above
inline constexpr double kSumF2Truncated = 2.8903685863648108e-3;  // [0, 10 omega_c]
inline constexpr double kSumF2Infinite = 2.8904208696958187e-3;   // closed form
inline constexpr double kPopulationTruncated = 2.8820304304326139e-3;
inline constexpr double kIntJExpTruncated = 5.6355215765130258e-2;  // int J e^{-w}

// small deterministic generator for probe vectors and perturbations
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    double uniform() {  // in (-1, 1)
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return 2.0 * (static_cast<double>(z >> 11) / 9007199254740992.0) - 1.0;
    }

private:
    std::uint64_t state_;
};

} // namespace testsupport
