#include "qreset/quadrature.hpp"

#include <cmath>

namespace qreset::quad {

std::vector<Node> gauss_legendre(std::size_t n, double a, double b) {
    if (n == 0) throw ConfigError("gauss_legendre: n must be >= 1");
    if (!(b > a)) throw ConfigError("gauss_legendre: requires b > a");

    const double pi = 3.14159265358979323846;
    const double xm = 0.5 * (b + a);
    const double xl = 0.5 * (b - a);
    std::vector<Node> nodes(n);

    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        // root of P_n near the Chebyshev estimate, refined by Newton
        double z = std::cos(pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0, p2 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                const double jd = static_cast<double>(j);
                p1 = ((2.0 * jd + 1.0) * z * p2 - jd * p3) / (jd + 1.0);
            }
            pp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        const double w = 2.0 * xl / ((1.0 - z * z) * pp * pp);
        nodes[i] = {xm - xl * z, w};
        nodes[n - 1 - i] = {xm + xl * z, w};
    }
    return nodes;
}

} // namespace qreset::quad
