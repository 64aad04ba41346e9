#include "toroidal/param.hpp"

#include <fmt/format.h>

#include <random>

namespace toroidal {

ParamSpec::ParamSpec(const Scalar& s1, const Scalar& s2, long genericity_bound, Fault fault)
    : bound_(genericity_bound), fault_(fault) {
    if (s1.is_zero() || s2.is_zero()) throw std::invalid_argument("ParamSpec: s1,s2 must be nonzero");
    s_[0] = s1;
    s_[1] = s2;
    s_[2] = (s1 * s2).inv(); // s1 s2 s3 = 1
    // Checked family per the q̌ translation: q̌1 = q1^{-1}, q̌2 = q2, and the
    // product constraint fixes š3.
    scheck_[0] = s1.inv();
    scheck_[1] = s2;
    scheck_[2] = s1 / s2;
    genericity_check();
}

void ParamSpec::genericity_check() const {
    Scalar q1 = s_[0] * s_[0], q2 = s_[1] * s_[1];
    long E = bound_;
    std::vector<Scalar> p1, p2;
    for (long a = -E; a <= E; ++a) p1.push_back(q1.pow(a));
    for (long b = -E; b <= E; ++b) p2.push_back(q2.pow(b));
    for (long a = -E; a <= E; ++a)
        for (long b = -E; b <= E; ++b) {
            if (a == 0 && b == 0) continue;
            if (p1[a + E] * p2[b + E] == Scalar(1))
                throw GenericityViolation(fmt::format("q1^{} * q2^{} = 1 (s1={}, s2={})", a, b,
                                                      s_[0].str(), s_[1].str()));
        }
}

ParamSpec ParamSpec::from_seed(std::uint64_t seed, long genericity_bound, Fault fault) {
    // Curated pool of candidate square roots with disjoint prime support.
    static const std::vector<std::pair<long, long>> pool = {
        {2, 3}, {3, 5}, {5, 7}, {2, 5}, {3, 7}, {2, 7}, {5, 11},
        {7, 11}, {3, 11}, {2, 11}, {7, 13}, {5, 13}, {11, 13}, {3, 13},
    };
    std::mt19937_64 rng(seed);
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::size_t i = rng() % pool.size();
        std::size_t j = rng() % pool.size();
        if (i == j) continue;
        try {
            return ParamSpec(Scalar(pool[i].first, pool[i].second),
                             Scalar(pool[j].first, pool[j].second), genericity_bound, fault);
        } catch (const GenericityViolation&) {
            continue;
        }
    }
    throw GenericityViolation("from_seed: no generic pair found in pool");
}

Scalar ParamSpec::s(int i, Family f) const {
    if (i < 1 || i > 3) throw std::invalid_argument("ParamSpec::s: index out of range");
    return f == Family::Plain ? s_[i - 1] : scheck_[i - 1];
}

Scalar ParamSpec::kappa(long r, Family f) const {
    Scalar one(1);
    Scalar v = (one - q(1, f).pow(r)) * (one - q(2, f).pow(r)) * (one - q(3, f).pow(r));
    if (fault_ == Fault::Kappa1PlusOne && r == 1 && f == Family::Plain) v += one;
    return v;
}

Scalar ParamSpec::c(int i, Family f) const {
    Scalar si = s(i, f);
    Scalar v = kappa(1, f) / (si - si.inv());
    if (fault_ == Fault::C1PlusOne && i == 1 && f == Family::Plain) v += Scalar(1);
    return v;
}

Scalar ParamSpec::k_chain_step(Family f) const {
    Scalar step = q(1, f);
    if (fault_ == Fault::K1Shift && f == Family::Plain) step *= q(1, f);
    return step;
}

RationalFunction1 ParamSpec::omega(Family f) const {
    using RF = RationalFunction1;
    auto num = RF::lmul(RF::one_minus(q(2, f)), RF::one_minus(q(3, f)));
    auto den = RF::lmul(RF::one_minus(Scalar(1)), RF::one_minus(q(2, f) * q(3, f)));
    return RationalFunction1(num, den);
}

Poly ParamSpec::g_poly(Family f) const {
    return z_minus(q(1, f)) * z_minus(q(2, f)) * z_minus(q(3, f));
}

ParamSpec ParamSpec::swapped() const {
    ParamSpec r(scheck_[0], scheck_[1], bound_, fault_);
    r.K_scalar = Kcheck_scalar;
    r.Kcheck_scalar = K_scalar;
    r.psi0_scalar = psi0_scalar;
    return r;
}

std::string ParamSpec::digest() const {
    return fmt::format("s1={};s2={};E={};fault={};K={};Kc={};psi0={}", s_[0].str(), s_[1].str(),
                       bound_, static_cast<int>(fault_), K_scalar.str(), Kcheck_scalar.str(),
                       psi0_scalar.str());
}

namespace {

ScalarCheck rational_identity(const std::string& name, const RationalFunction1& lhs,
                              const RationalFunction1& rhs) {
    bool ok = lhs.equals(rhs);
    std::string detail;
    if (!ok) {
        auto diff = lhs - rhs;
        // report the discrepancy at a harmless sample point
        try {
            detail = fmt::format("difference at x=17/19: {}", diff.eval(Scalar(17, 19)).str());
        } catch (const std::domain_error&) {
            detail = "nonzero rational-function difference";
        }
    }
    return {name, ok, detail};
}

} // namespace

std::vector<ScalarCheck> check_scalar_identities(const ParamSpec& spec) {
    std::vector<ScalarCheck> out;
    using RF = RationalFunction1;

    for (Family fam : {Family::Plain, Family::Checked}) {
        std::string tag = fam == Family::Plain ? "" : "_checked";
        auto om = spec.omega(fam);
        Scalar q1 = spec.q(1, fam), q2 = spec.q(2, fam), q3 = spec.q(3, fam);

        // omega(q1 x) = omega(x^{-1})
        out.push_back(rational_identity("omega_q1_inversion" + tag, om.subst(q1),
                                        om.subst(Scalar(1), -1)));

        // omega(q1 x)/omega(x) = -G(x)/H(x) with G(x)=g(z,w)/w^3, H(x)=g(w,z)/w^3, x=z/w.
        {
            RF G({{3, Scalar(1)}}, {{0, Scalar(1)}});
            RF H = G;
            for (Scalar qi : {q1, q2, q3}) {
                G = G * RF({{0, -qi}, {1, Scalar(1)}}, {{1, Scalar(1)}}); // (x - qi)/x ... times x^3 overall
                H = H * RF(RF::one_minus(qi), {{0, Scalar(1)}});
            }
            // G built as x^3 * prod (x-qi)/x = prod (x - qi); H = prod (1 - qi x).
            out.push_back(rational_identity("omega_g_ratio" + tag, om.subst(q1) / om,
                                            RF({{0, Scalar(-1)}}, {{0, Scalar(1)}}) * G / H));
        }

        // omega(0) = omega(inf) = 1
        {
            auto at0 = om.expand(Direction::AtZero, 2).coeff(0);
            auto atinf = om.expand(Direction::AtInfinity, 2).coeff(0);
            bool ok = at0 && atinf && *at0 == Scalar(1) && *atinf == Scalar(1);
            out.push_back({"omega_limits" + tag, ok,
                           ok ? "" : fmt::format("omega(0)={}, omega(inf)={}",
                                                 at0 ? at0->str() : "?", atinf ? atinf->str() : "?")});
        }

        // omega+(x) - omega-(x) = c1/(s1^{-1}-s1) * (delta(x) - delta(q1^{-1} x))
        {
            long L = 8;
            auto plus = om.expand(Direction::AtZero, L + 1);
            auto minus = om.expand(Direction::AtInfinity, L + 1);
            Scalar s1 = spec.s(1, fam);
            Scalar coef = spec.c(fam == Family::Plain ? 1 : 1, fam) / (s1.inv() - s1);
            // under the plain family the injected c1 fault shows up here on purpose
            bool ok = true;
            std::string detail;
            for (long n = -L; n <= L; ++n) {
                Scalar lhs = n >= 0 ? *plus.coeff(n) : Scalar(0);
                lhs -= n <= 0 ? *minus.coeff(n) : Scalar(0);
                Scalar rhs = coef * (Scalar(1) - q1.pow(-n));
                if (lhs != rhs) {
                    ok = false;
                    detail = fmt::format("x^{}: lhs {}, rhs {}", n, lhs.str(), rhs.str());
                    break;
                }
            }
            out.push_back({"omega_delta_identity" + tag, ok, detail});
        }
    }

    // Appendix-A f-sum: f1+f2+f3 = -q2^{-1}(1-q2^{-1})(z1-q2 z2) w, where
    // a = qbar1 = q1*s3, b = qbar3 = s3 and ab = q2^{-1}.
    {
        Scalar a = spec.q(1) * spec.s(3), b = spec.s(3), q2 = spec.q(2);
        auto var = [&](int i) { return Poly::monomial(3, i, 1); }; // z1, z2, w
        Poly z1 = var(0), z2 = var(1), w = var(2);
        auto scaled = [&](const Poly& p, const Scalar& c) { return p * c; };
        Poly f1 = scaled(scaled(z1, b) - w, a) * (scaled(z2, b) - w);
        Poly f2 = (scaled(z1, b) - w) * (z2 - scaled(w, a)) * (-(Scalar(1) + a * b));
        Poly f3 = scaled((z1 - scaled(w, a)) * (z2 - scaled(w, a)), b);
        Poly lhs = f1 + f2 + f3;
        Poly rhs = (z1 - scaled(z2, q2)) * w * (-(q2.inv()) * (Scalar(1) - q2.inv()));
        bool ok = (lhs - rhs).is_zero();
        out.push_back({"appendixA_f_sum", ok,
                       ok ? "" : (lhs - rhs).str({"z1", "z2", "w"})});
    }

    // Fusion well-definedness constants for the standard fusions.
    {
        auto g = spec.g_poly();
        auto gval = [&](const Scalar& z, const Scalar& w) { return g.eval({z, w}); };
        Scalar q1 = spec.q(1);
        Scalar g1 = gval(Scalar(1), q1);
        Scalar g1bad = gval(Scalar(1), q1.inv());
        bool ok = !g1.is_zero() && g1bad.is_zero();
        std::string detail = fmt::format("g(1,q1)={}, g(1,1/q1)={}, swap constant c={}", g1.str(),
                                         g1bad.str(), (-gval(q1, Scalar(1)) / g1).str());
        out.push_back({"fusion_constants", ok, detail});
    }

    // kappa_r two routes: factored vs expanded, r in [-6,6].
    {
        bool ok = true;
        std::string detail;
        for (long r = -6; r <= 6 && ok; ++r) {
            Scalar factored = spec.kappa(r);
            Scalar q1 = spec.q(1), q2 = spec.q(2), q3 = spec.q(3);
            Scalar e1 = q1.pow(r) + q2.pow(r) + q3.pow(r);
            Scalar e2 = (q1 * q2).pow(r) + (q1 * q3).pow(r) + (q2 * q3).pow(r);
            Scalar expanded = Scalar(1) - e1 + e2 - Scalar(1); // q1q2q3 = 1
            if (spec.fault() == Fault::Kappa1PlusOne && r == 1) expanded += Scalar(1);
            if (factored != expanded) {
                ok = false;
                detail = fmt::format("r={}: factored {}, expanded {}", r, factored.str(),
                                     expanded.str());
            }
        }
        out.push_back({"kappa_two_routes", ok, detail});
    }

    return out;
}

} // namespace toroidal
