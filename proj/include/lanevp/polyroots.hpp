#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace lanevp {

namespace detail {

/// Horner evaluation of c[0] + c[1]*t + ... + c[n]*t^n.
inline double horner(std::span<const double> coeffs, double t) {
    double acc = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * t + coeffs[i];
    return acc;
}

inline double horner_deriv(std::span<const double> coeffs, double t) {
    double acc = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 1;) acc = acc * t + coeffs[i] * static_cast<double>(i);
    return acc;
}

/// Real eigenvalues of a small upper-Hessenberg matrix via the shifted QR
/// iteration with Francis double shifts (EISPACK hqr lineage). Complex
/// pairs are discarded. Returns false if the iteration fails to converge.
inline bool real_eigen_hessenberg(double* m, int n, std::vector<double>& out) {
    auto a = [&](int r, int c) -> double& { return m[r * n + c]; };
    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::fabs(a(i, j));
    if (anorm == 0.0) {
        out.insert(out.end(), static_cast<std::size_t>(n), 0.0);
        return true;
    }

    int nn = n - 1;
    double t = 0.0;
    while (nn >= 0) {
        int its = 0;
        for (;;) {
            int l;
            for (l = nn; l >= 1; --l) {
                double s = std::fabs(a(l - 1, l - 1)) + std::fabs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::fabs(a(l, l - 1)) + s == s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = a(nn, nn);
            if (l == nn) {  // one eigenvalue isolated
                out.push_back(x + t);
                --nn;
                break;
            }
            double y = a(nn - 1, nn - 1);
            double w = a(nn, nn - 1) * a(nn - 1, nn);
            if (l == nn - 1) {  // trailing 2x2 block
                double p = 0.5 * (y - x);
                double q = p * p + w;
                double z = std::sqrt(std::fabs(q));
                x += t;
                if (q >= 0.0) {  // real pair
                    z = p + std::copysign(z, p);
                    out.push_back(x + z);
                    out.push_back(z != 0.0 ? x - w / z : x + z);
                }
                nn -= 2;
                break;
            }
            if (its == 30) return false;
            if (its == 10 || its == 20) {  // exceptional shift
                t += x;
                for (int i = 0; i <= nn; ++i) a(i, i) -= x;
                double s = std::fabs(a(nn, nn - 1)) + std::fabs(a(nn - 1, nn - 2));
                y = x = 0.75 * s;
                w = -0.4375 * s * s;
            }
            ++its;

            double p = 0.0, q = 0.0, r = 0.0;
            int mstart;
            for (mstart = nn - 2; mstart >= l; --mstart) {
                double z = a(mstart, mstart);
                double rr = x - z;
                double ss = y - z;
                p = (rr * ss - w) / a(mstart + 1, mstart) + a(mstart, mstart + 1);
                q = a(mstart + 1, mstart + 1) - z - rr - ss;
                r = a(mstart + 2, mstart + 1);
                double s = std::fabs(p) + std::fabs(q) + std::fabs(r);
                p /= s;
                q /= s;
                r /= s;
                if (mstart == l) break;
                double u = std::fabs(a(mstart, mstart - 1)) * (std::fabs(q) + std::fabs(r));
                double v = std::fabs(p) *
                           (std::fabs(a(mstart - 1, mstart - 1)) + std::fabs(z) +
                            std::fabs(a(mstart + 1, mstart + 1)));
                if (u + v == v) break;
            }
            for (int i = mstart + 2; i <= nn; ++i) {
                a(i, i - 2) = 0.0;
                if (i != mstart + 2) a(i, i - 3) = 0.0;
            }
            for (int k = mstart; k <= nn - 1; ++k) {  // bulge chase
                if (k != mstart) {
                    p = a(k, k - 1);
                    q = a(k + 1, k - 1);
                    r = (k != nn - 1) ? a(k + 2, k - 1) : 0.0;
                    x = std::fabs(p) + std::fabs(q) + std::fabs(r);
                    if (x != 0.0) {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                double s = std::copysign(std::sqrt(p * p + q * q + r * r), p);
                if (s == 0.0) continue;
                if (k == mstart) {
                    if (l != mstart) a(k, k - 1) = -a(k, k - 1);
                } else {
                    a(k, k - 1) = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                double z = r / s;
                q /= p;
                r /= p;
                for (int j = k; j <= nn; ++j) {  // row transform
                    double pp = a(k, j) + q * a(k + 1, j);
                    if (k != nn - 1) {
                        pp += r * a(k + 2, j);
                        a(k + 2, j) -= pp * z;
                    }
                    a(k + 1, j) -= pp * y;
                    a(k, j) -= pp * x;
                }
                int mmin = std::min(nn, k + 3);
                for (int i = l; i <= mmin; ++i) {  // column transform
                    double pp = x * a(i, k) + y * a(i, k + 1);
                    if (k != nn - 1) {
                        pp += z * a(i, k + 2);
                        a(i, k + 2) -= pp * r;
                    }
                    a(i, k + 1) -= pp * q;
                    a(i, k) -= pp;
                }
            }
        }
    }
    return true;
}

/// Bisection fallback for the (practically unreachable) case where the QR
/// iteration does not converge: scan for sign changes over a wide bracket.
inline std::vector<double> scan_roots(std::span<const double> coeffs, double radius) {
    std::vector<double> out;
    const int kSteps = 4096;
    double prev_t = -radius;
    double prev_v = horner(coeffs, prev_t);
    for (int i = 1; i <= kSteps; ++i) {
        double t = -radius + (2.0 * radius * i) / kSteps;
        double v = horner(coeffs, t);
        if (prev_v == 0.0) out.push_back(prev_t);
        if ((prev_v < 0.0) != (v < 0.0) && prev_v != 0.0 && v != 0.0) {
            double lo = prev_t, hi = t, flo = prev_v;
            for (int it = 0; it < 80; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = horner(coeffs, mid);
                if ((flo < 0.0) == (fm < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            out.push_back(0.5 * (lo + hi));
        }
        prev_t = t;
        prev_v = v;
    }
    return out;
}

}  // namespace detail

/// Real roots of c[0] + c[1]*t + ..., ascending coefficients, for degrees
/// up to 3. `scale` is the magnitude of the interval the caller cares
/// about; leading terms whose contribution over |t| <= scale is negligible
/// relative to the polynomial are dropped first, so a cubic that is a line
/// plus rounding noise resolves as a line. Degree <= 2 is solved in closed
/// form; a true cubic goes through companion-matrix eigenvalues. Roots are
/// returned sorted ascending.
inline std::vector<double> real_roots(std::span<const double> coeffs, double scale) {
    const double kStripTol = 1e-9;
    double s = std::max(scale, 1.0);

    int deg = static_cast<int>(coeffs.size()) - 1;
    while (deg >= 0 && coeffs[deg] == 0.0) --deg;
    if (deg < 0) return {};

    double max_term = 0.0;
    double pw = 1.0;
    for (int k = 0; k <= deg; ++k) {
        max_term = std::max(max_term, std::fabs(coeffs[k]) * pw);
        pw *= s;
    }
    if (max_term == 0.0) return {};
    while (deg > 0 && std::fabs(coeffs[deg]) * std::pow(s, deg) <= kStripTol * max_term) --deg;

    std::vector<double> roots;
    if (deg == 0) return {};
    if (deg == 1) {
        roots.push_back(-coeffs[0] / coeffs[1]);
        return roots;
    }
    if (deg == 2) {
        double a = coeffs[2], b = coeffs[1], c = coeffs[0];
        double disc = b * b - 4.0 * a * c;
        if (disc < 0.0) return {};
        if (disc == 0.0) {
            roots.push_back(-b / (2.0 * a));
            return roots;
        }
        double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
        if (q == 0.0) {  // b == 0 and disc == -4ac > 0
            double r = std::sqrt(-c / a);
            roots = {-r, r};
        } else {
            roots = {q / a, c / q};
        }
        std::sort(roots.begin(), roots.end());
        return roots;
    }

    // Cubic: substitute t = s*u so the companion matrix is well balanced,
    // then take its eigenvalues.
    double c3 = coeffs[3] * s * s * s;
    std::array<double, 9> comp = {
        -coeffs[2] * s * s / c3, -coeffs[1] * s / c3, -coeffs[0] / c3,
        1.0, 0.0, 0.0,
        0.0, 1.0, 0.0};
    std::vector<double> eig;
    if (!detail::real_eigen_hessenberg(comp.data(), 3, eig)) {
        eig = detail::scan_roots(coeffs, 4.0 * s);
        std::sort(eig.begin(), eig.end());
        return eig;
    }
    for (double u : eig) {
        double t = u * s;
        // Two Newton polish steps against the original coefficients.
        for (int it = 0; it < 2; ++it) {
            double d = detail::horner_deriv(coeffs, t);
            if (std::fabs(d) < 1e-300) break;
            t -= detail::horner(coeffs, t) / d;
        }
        roots.push_back(t);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace lanevp
