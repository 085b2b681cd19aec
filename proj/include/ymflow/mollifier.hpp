#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace ymflow {

// Compactly supported space-time mollifier chi(t,x) = chi_t(t) * chi_x(|x|)
// built from polynomial bumps, with supp chi inside the parabolic ball of
// radius 1/4 and unit integral. chi is even in each spatial coordinate by
// radial symmetry. The non-anticipative variant has chi_t supported in
// (0, tau0).
struct MollifierSpec {
    enum class Variant { Symmetric, NonAnticipative };

    Variant variant = Variant::NonAnticipative;
    int p = 8;            // bump smoothness exponent
    double tau0 = 0.014;  // time half-width (symmetric) or width (non-ant.)
    double r0 = 0.13;     // spatial radius; sqrt(tau0) + r0 < 1/4

    static MollifierSpec by_name(const std::string& name) {
        MollifierSpec m;
        if (name == "nonanticipative") m.variant = Variant::NonAnticipative;
        else if (name == "symmetric") m.variant = Variant::Symmetric;
        else throw std::invalid_argument("unknown mollifier variant: " + name);
        return m;
    }
    std::string name() const {
        return variant == Variant::NonAnticipative ? "nonanticipative" : "symmetric";
    }

    double t_min() const { return variant == Variant::NonAnticipative ? 0.0 : -tau0; }
    double t_max() const { return tau0; }

    // Normalised time profile (unit integral over its support).
    double chi_t(double t) const {
        if (variant == Variant::Symmetric) {
            const double u = t / tau0;
            if (std::abs(u) >= 1.0) return 0.0;
            return ct_norm() * std::pow(1.0 - u * u, p);
        }
        const double u = t / tau0;
        if (u <= 0.0 || u >= 1.0) return 0.0;
        return ct_norm() * std::pow(4.0 * u * (1.0 - u), p);
    }

    // Normalised radial spatial profile (unit integral over the plane).
    double chi_x(double r) const {
        const double u = r / r0;
        if (u >= 1.0) return 0.0;
        return cx_norm() * std::pow(1.0 - u * u, p);
    }

    double chi(double t, double x1, double x2) const {
        return chi_t(t) * chi_x(std::hypot(x1, x2));
    }

    // Parabolic rescaling chi_eps(t,x) = eps^{-4} chi(t/eps^2, x/eps).
    double chi_eps(double eps, double t, double x1, double x2) const {
        const double e4 = eps * eps * eps * eps;
        return chi(t / (eps * eps), x1 / eps, x2 / eps) / e4;
    }

    // Spatial Fourier transform of chi_x: closed form via Bessel functions,
    // \hat{chi_x}(q) = cx * 2 pi r0^2 2^p p! J_{p+1}(q r0) / (q r0)^{p+1}.
    double chi_hat_x(double q) const {
        const double z = q * r0;
        double jfac;
        if (z < 1e-6) {
            jfac = 1.0 / (std::pow(2.0, p + 1) * std::tgamma(p + 2.0));
        } else {
            jfac = std::cyl_bessel_j(p + 1, z) / std::pow(z, p + 1);
        }
        return cx_norm() * 2.0 * M_PI * r0 * r0 * std::pow(2.0, p) *
               std::tgamma(p + 1.0) * jfac;
    }

  private:
    double ct_norm() const {
        if (variant == Variant::Symmetric) {
            // int_{-1}^1 (1-u^2)^p du = 2^{2p+1} (p!)^2 / (2p+1)!
            const double I = std::pow(2.0, 2 * p + 1) *
                             std::tgamma(p + 1.0) * std::tgamma(p + 1.0) /
                             std::tgamma(2.0 * p + 2.0);
            return 1.0 / (tau0 * I);
        }
        // int_0^1 (4u(1-u))^p du = 4^p B(p+1,p+1) = 4^p (p!)^2/(2p+1)!
        const double I = std::pow(4.0, p) * std::tgamma(p + 1.0) *
                         std::tgamma(p + 1.0) / std::tgamma(2.0 * p + 2.0);
        return 1.0 / (tau0 * I);
    }
    double cx_norm() const {
        // int_{R^2} (1-(r/r0)^2)^p dx = pi r0^2 / (p+1)
        return (p + 1.0) / (M_PI * r0 * r0);
    }
};

}  // namespace ymflow
