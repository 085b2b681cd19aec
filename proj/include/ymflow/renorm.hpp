#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ymflow/heatkernel.hpp"
#include "ymflow/mollifier.hpp"

namespace ymflow {

struct RenormConstants {
    double eps = 0.0;
    double cbar = 0.0;          // int (K^eps)^2
    double chat = 0.0;          // int d_j K^eps (d_j K * K^eps), j irrelevant
    double chat_j1 = 0.0, chat_j2 = 0.0;
    double csym = 0.0;          // 4 chat - cbar, stored exactly
    double ctilde = 0.0;        // int chi^eps (K * K^eps)
    double ctilde0 = 0.0;       // (K * K^eps)(0)
    double err_cbar = 0.0, err_chat = 0.0, err_ctilde = 0.0;
    std::string mollifier;
    std::string fingerprint;
};

namespace renorm_detail {

struct SNode { double s; double w; };  // time-shift node with rho_t weight

// Gauss-Legendre nodes on [a,b] with m=16.
inline void gl16(double a, double b, std::vector<double>& xs, std::vector<double>& ws) {
    static const double n16[8] = {0.9894009349916499, 0.9445750230732326,
                                  0.8656312023878318, 0.7554044083550030,
                                  0.6178762444026438, 0.4580167776572274,
                                  0.2816035507792589, 0.0950125098376374};
    static const double w16[8] = {0.0271524594117541, 0.0622535239386479,
                                  0.0951585116824928, 0.1246289712555339,
                                  0.1495959888165767, 0.1691565193950025,
                                  0.1826034150449236, 0.1894506104550685};
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 7; i >= 0; --i) { xs.push_back(c - h * n16[i]); ws.push_back(h * w16[i]); }
    for (int i = 0; i < 8; ++i) { xs.push_back(c + h * n16[i]); ws.push_back(h * w16[i]); }
}

// Autocorrelation of the unit-scale time profile at shift sigma.
inline double rho_t_unit(const MollifierSpec& chi, double sigma) {
    const double lo = chi.t_min(), hi = chi.t_max();
    std::vector<double> xs, ws;
    const int panels = 6;
    for (int p = 0; p < panels; ++p)
        gl16(lo + (hi - lo) * p / panels, lo + (hi - lo) * (p + 1) / panels, xs, ws);
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        acc += ws[i] * chi.chi_t(xs[i]) * chi.chi_t(xs[i] + sigma);
    return acc;
}

}  // namespace renorm_detail

// Evaluator for all renormalisation constants at a given scale eps. Works in
// spatial Fourier space: the Gaussian part of every correlation is in closed
// form, the truncation corrections come from KernelTables.
class RenormEvaluator {
  public:
    RenormEvaluator(const KernelSpec& ker, const MollifierSpec& chi, double eps,
                    int level = 0)
        : ker_(ker), chi_(chi), eps_(eps), level_(level) {
        build_grids();
        tables_ = std::make_unique<KernelTables>(ker_, qs_, level_ >= 1 ? 0.001 : 0.002);
    }

    RenormConstants compute() const {
        RenormConstants c;
        c.eps = eps_;
        c.mollifier = chi_.name();
        c.fingerprint = fingerprint();
        double cbar = 0.0, chat_r = 0.0, ct = 0.0;
        for (const auto& sn : snodes_) {
            double iw = 0.0, ix = 0.0, iv = 0.0;
            for (std::size_t iq = 0; iq < qs_.size(); ++iq) {
                const double q = qs_[iq];
                const double wq = qw_[iq];
                const double rx = rhox_[iq];  // chi_hat_x(eps q)^2
                iw += wq * q * rx * what(sn.s, int(iq));
                ix += wq * q * q * q * rx * xhat(sn.s, int(iq));
                if (sn.s >= 0.0) iv += wq * q * rx * vhat(sn.s, int(iq));
            }
            cbar += sn.w * iw / (2.0 * M_PI);
            chat_r += sn.w * ix;
            ct += sn.w * iv / (2.0 * M_PI);
        }
        c.cbar = cbar;
        // angular factors: (2pi)^{-2} int q_j^2 F(|q|) dq
        //   = (2pi)^{-2} * (int_0^{2pi} cos^2 or sin^2) * int q^3 F dq
        const int M = 16;
        double a1 = 0.0, a2 = 0.0;
        for (int m = 0; m < M; ++m) {
            const double th = 2.0 * M_PI * m / M;
            a1 += std::cos(th) * std::cos(th) * (2.0 * M_PI / M);
            a2 += std::sin(th) * std::sin(th) * (2.0 * M_PI / M);
        }
        c.chat_j1 = chat_r * a1 / (4.0 * M_PI * M_PI);
        c.chat_j2 = chat_r * a2 / (4.0 * M_PI * M_PI);
        c.chat = c.chat_j1;
        c.csym = 4.0 * c.chat - c.cbar;
        c.ctilde = ct;
        c.ctilde0 = ctilde0();
        return c;
    }

    // The two sides of the integral identity for csym:
    //   4 chat - cbar  =  Int[(K*K^eps) chi^eps] + Int[(K*K^eps)(Q*chi^eps)]
    //                     + Int[(Q*K^eps) K^eps].
    struct IdentityCheck { double lhs, rhs, t1, t2, t3; };
    IdentityCheck identity_check() const {
        RenormConstants c = compute();
        double t2 = 0.0, t3 = 0.0;
        for (const auto& sn : snodes_) {
            double i2 = 0.0, i3 = 0.0;
            for (std::size_t iq = 0; iq < qs_.size(); ++iq) {
                const double q = qs_[iq];
                i2 += qw_[iq] * q * rhox_[iq] * vq_corr(sn.s, int(iq));
                i3 += qw_[iq] * q * rhox_[iq] * zk_corr(sn.s, int(iq));
            }
            t2 += sn.w * i2 / (2.0 * M_PI);
            t3 += sn.w * i3 / (2.0 * M_PI);
        }
        return {c.csym, c.ctilde + t2 + t3, c.ctilde, t2, t3};
    }

  private:
    std::string fingerprint() const {
        char buf[128];
        std::snprintf(buf, sizeof buf, "eps=%.10g|moll=%s|ss%d|L%d", eps_,
                      chi_.name().c_str(), ker_.order, level_);
        return buf;
    }

    void build_grids() {
        // q grid: fine panels resolving the correction tables, then
        // bump-period panels out to where the mollifier transform has decayed.
        const double r0e = chi_.r0 * eps_;
        const double qmax = std::max(220.0, 25.0 / r0e);
        const double fine_w = (level_ >= 1) ? 3.0 : 5.0;
        for (double q = 0.0; q < std::min(qmax, KernelTables::q_stop); q += fine_w)
            add_q_panel(q, std::min({q + fine_w, qmax, KernelTables::q_stop}));
        if (qmax > KernelTables::q_stop) {
            const double ow = std::max(20.0, M_PI / r0e / ((level_ >= 1) ? 8.0 : 6.0));
            for (double q = KernelTables::q_stop; q < qmax; q += ow)
                add_q_panel(q, std::min(q + ow, qmax));
        }
        rhox_.resize(qs_.size());
        for (std::size_t i = 0; i < qs_.size(); ++i) {
            const double v = chi_.chi_hat_x(eps_ * qs_[i]);
            rhox_[i] = v * v;
        }
        // s grid: GL nodes over the support of the time autocorrelation,
        // weighted by rho_t (unit scale, s = eps^2 sigma).
        const double wdt = chi_.t_max() - chi_.t_min();
        std::vector<double> xs, ws;
        const int pan = (level_ >= 1) ? 6 : 4;
        for (int p = 0; p < pan; ++p)
            renorm_detail::gl16(-wdt + 2.0 * wdt * p / pan,
                                -wdt + 2.0 * wdt * (p + 1) / pan, xs, ws);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double rho = renorm_detail::rho_t_unit(chi_, xs[i]);
            if (rho <= 0.0) continue;
            snodes_.push_back({eps_ * eps_ * xs[i], ws[i] * rho});
        }
    }

    void add_q_panel(double a, double b) {
        std::vector<double> xs, ws;
        renorm_detail::gl16(a, b, xs, ws);
        qs_.insert(qs_.end(), xs.begin(), xs.end());
        qw_.insert(qw_.end(), ws.begin(), ws.end());
    }

    bool has_corr(std::size_t iq) const { return int(iq) < tables_->nq_corr(); }

    // --- per-(s,q) evaluators ------------------------------------------------

    // W(s,q) = int Khat(t) Khat(t+|s|) dt
    double what(double s, int iq) const {
        const double q = qs_[iq];
        const double q2 = q * q;
        s = std::abs(s);
        if (s >= 1.0) return 0.0;
        double val = std::exp(-q2 * s) * quad::I0(0.0, 1.0 - s, 2.0 * q2);
        if (has_corr(iq)) {
            // cross terms and D*D
            double t1 = 0.0, t2 = 0.0, t3 = 0.0;
            quad::Grid g1 = quad::graded_exp_grid(1.0 - s, q);
            for (std::size_t i = 0; i < g1.size(); ++i)
                t1 += g1.w[i] * tables_->D(iq, g1.x[i]) * std::exp(-q2 * g1.x[i]);
            t1 *= std::exp(-q2 * s);
            quad::Grid g2 = quad::graded_exp_grid(1.0, q);
            for (std::size_t i = 0; i < g2.size(); ++i)
                t2 += g2.w[i] * tables_->D(iq, g2.x[i] + s) * std::exp(-q2 * g2.x[i]);
            const int nt = tables_->nt();
            const double ht = tables_->ht();
            for (int i = 0; i < nt; ++i)
                t3 += KernelTables::simpson_w(i, nt) * ht * tables_->D_node(iq, i) *
                      tables_->D(iq, i * ht + s);
            val += t1 + t2 + t3;
        }
        return val;
    }

    // X(s,q) = int Khat(t) Vhat(t+s) dt
    double xhat(double s, int iq) const {
        const double q = qs_[iq];
        const double q2 = q * q;
        double val;
        if (s >= 0.0) {
            val = std::exp(-q2 * s) *
                  (quad::I1(0.0, 1.0 - s, 2.0 * q2, s) +
                   (2.0 - s) * quad::I0(1.0 - s, 1.0, 2.0 * q2) -
                   quad::I1(1.0 - s, 1.0, 2.0 * q2, 0.0));
        } else {
            const double sg = -s;
            val = std::exp(-q2 * sg) * quad::I1(0.0, 1.0 - sg, 2.0 * q2, 0.0);
        }
        if (has_corr(iq)) {
            double x1 = 0.0, x2 = 0.0, x3 = 0.0;
            quad::Grid g1 = quad::graded_exp_grid(1.0, q);
            for (std::size_t i = 0; i < g1.size(); ++i) {
                const double t = g1.x[i];
                x1 += g1.w[i] * std::exp(-q2 * t) * tables_->VD(iq, t + s);
                const double tau = t + s;
                if (tau > 0.0 && tau < 2.0) {
                    const double w = std::min(tau, 2.0 - tau);
                    x2 += g1.w[i] * tables_->D(iq, t) * w * std::exp(-q2 * tau);
                }
            }
            const int nt = tables_->nt();
            const double ht = tables_->ht();
            for (int i = 0; i < nt; ++i)
                x3 += KernelTables::simpson_w(i, nt) * ht * tables_->D_node(iq, i) *
                      tables_->VD(iq, i * ht + s);
            val += x1 + x2 + x3;
        }
        return val;
    }

    // V(s,q) = (Khat * Khat)(s,q), s >= 0
    double vhat(double s, int iq) const {
        if (s <= 0.0) return 0.0;
        const double q2 = qs_[iq] * qs_[iq];
        const double w = (s <= 1.0) ? s : std::max(0.0, 2.0 - s);
        double val = w * std::exp(-q2 * s);
        if (has_corr(iq)) val += tables_->VD(iq, s);
        return val;
    }

    // (K*K^eps)(0) = int chi_t^eps(-t) [spatial pairing of chi_hat and Vhat].
    double ctilde0() const {
        // exactly zero for non-anticipative profiles by support disjointness
        double acc = 0.0;
        const double wdt = chi_.t_max() - chi_.t_min();
        std::vector<double> xs, ws;
        const int pan = (level_ >= 1) ? 6 : 4;
        for (int p = 0; p < pan; ++p)
            renorm_detail::gl16(chi_.t_min() + wdt * p / pan,
                                chi_.t_min() + wdt * (p + 1) / pan, xs, ws);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double t = -xs[i] * eps_ * eps_;  // V evaluated at -t
            const double ct = chi_.chi_t(xs[i]);
            if (ct == 0.0 || t <= 0.0) continue;
            double iv = 0.0;
            for (std::size_t iq = 0; iq < qs_.size(); ++iq)
                iv += qw_[iq] * qs_[iq] * chi_.chi_hat_x(eps_ * qs_[iq]) *
                      vhat(t, int(iq));
            acc += ws[i] * ct * iv / (2.0 * M_PI);
        }
        return acc;
    }

    // (V x Q)(s,q) = int Vhat(t) Qhat(t+s) dt
    double vq_corr(double s, int iq) const {
        if (!has_corr(iq)) return 0.0;
        const double q = qs_[iq];
        const double q2 = q * q;
        double acc = 0.0;
        quad::Grid g = quad::graded_exp_grid(2.0, q);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double t = g.x[i];
            const double w = std::min(t, 2.0 - t);
            if (w > 0.0)
                acc += g.w[i] * w * std::exp(-q2 * t) * tables_->Qh(iq, t + s);
        }
        const int nt = tables_->ntau();
        const double ht = tables_->ht();
        for (int i = 0; i < nt; ++i)
            acc += KernelTables::simpson_w(i, nt) * ht * tables_->V_node(iq, i) *
                   tables_->Qh(iq, i * ht + s);
        return acc;
    }

    // ((Q*K) x K)(s,q) = int Zt(t) Khat(t+s) dt
    double zk_corr(double s, int iq) const {
        if (!has_corr(iq)) return 0.0;
        const double q = qs_[iq];
        const double q2 = q * q;
        double acc = 0.0;
        // exponential part, resolved by a graded grid in u = t+s
        quad::Grid g = quad::graded_exp_grid(1.0, q);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double u = g.x[i];  // = t+s in (0,1]
            acc += g.w[i] * std::exp(-q2 * u) * tables_->Zt(iq, u - s);
        }
        // correction part on the uniform grid
        const int nt = tables_->nt();
        const double ht = tables_->ht();
        for (int i = 0; i < nt; ++i)
            acc += KernelTables::simpson_w(i, nt) * ht * tables_->Zt_node(iq, i) *
                   tables_->D(iq, i * ht + s);
        return acc;
    }

    const KernelSpec& ker_;
    MollifierSpec chi_;
    double eps_;
    int level_;
    std::vector<double> qs_, qw_, rhox_;
    std::vector<renorm_detail::SNode> snodes_;
    std::unique_ptr<KernelTables> tables_;
};

// Memoised entry point.
inline RenormConstants renorm_constants(double eps, const MollifierSpec& chi,
                                        int level = 0,
                                        const KernelSpec& ker = KernelSpec()) {
    static std::map<std::string, RenormConstants> cache;
    char key[128];
    std::snprintf(key, sizeof key, "%.10g|%s|%d|%d", eps, chi.name().c_str(),
                  ker.order, level);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    RenormEvaluator ev(ker, chi, eps, level);
    RenormConstants c = ev.compute();
    if (level == 0) {
        RenormEvaluator fine(ker, chi, eps, 1);
        RenormConstants cf = fine.compute();
        c.err_cbar = std::abs(cf.cbar - c.cbar);
        c.err_chat = std::abs(cf.chat - c.chat);
        c.err_ctilde = std::abs(cf.ctilde - c.ctilde);
        c.cbar = cf.cbar;
        c.chat = cf.chat;
        c.chat_j1 = cf.chat_j1;
        c.chat_j2 = cf.chat_j2;
        c.csym = cf.csym;
        c.ctilde = cf.ctilde;
        c.ctilde0 = cf.ctilde0;
    }
    cache[key] = c;
    return c;
}

}  // namespace ymflow
