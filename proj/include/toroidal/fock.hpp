#pragma once

#include "toroidal/atom.hpp"
#include "toroidal/basis.hpp"
#include "toroidal/param.hpp"
#include "toroidal/series.hpp"

#include <map>

namespace toroidal {

// Bosonic Fock module F_c(v) of one algebra family: exact mode actions of
// e, f, psi^±, k0^± and h_r on partition monomials. Modes are coefficients
// of z^{-k}; deg h_{-r} = -r, so e_k shifts degree by exactly k.
//
// Conventions (see repo docs): the spectral parameter enters the vertex
// operators as v^{±r} weights on the exponential coefficients and the f
// prefactor is -s_c^{-1}/((1-q_a)(1-q_b)); with these the ef, ee/ff, level-1
// and k-on-Fock checks all close exactly with K = 1.
class FockAction {
public:
    FockAction(const ParamSpec& spec, int color, Scalar v, Family fam);

    Vec e_mode(long k, const BasisKey& key) const;
    Vec f_mode(long k, const BasisKey& key) const;
    // sign +1 -> psi^+ (modes >= 0), -1 -> psi^- (modes <= 0)
    Vec psi_mode(int sign, bool inverted, long k, const BasisKey& key) const;
    Vec k0_mode(int sign, bool inverted, long k, const BasisKey& key) const;
    Vec h_mode(long r, const BasisKey& key) const;

    // One exponential vertex-operator factor inside a same-variable product:
    // prefactor * exp(sum_r cre(r) a^r h_{-r} z^r) exp(sum_r ann(r) a^{-r} h_r z^{-r}).
    // The factored forms carry (weight, base, {factor bases mu} meaning
    // prod (1 - mu^r)) and drive the exact two-point contractions.
    struct VertexFactor {
        Scalar prefactor;
        Scalar arg;                       // the a above
        std::function<Scalar(long)> cre, ann;
        Scalar cre_w, ann_w;              // scalar weights of the factored forms
        Scalar cre_base, ann_base;        // geometric bases (rho, sigma)
        std::vector<Scalar> cre_factors, ann_factors; // the mu's
        bool cre_zero = false, ann_zero = false;
    };

    // Vertex factor of one generator current (e, f, psi^±, k0^±).
    VertexFactor vertex_factor(AtomKind kind, bool inverted, const Scalar& arg) const;

    // Normal-ordered product of vertex factors at a shared variable, exact
    // mode action: prod prefactors * prod_{i<j} contraction(i,j) *
    // exp(sum CRE) exp(sum ANN) at mode k. A vanishing contraction gives 0,
    // a contraction pole raises IllDefinedFusion (via std::domain_error).
    Vec product_mode(const std::vector<VertexFactor>& fs, long k, const BasisKey& key) const;

    // exact value of exp(sum_{r>=1} t_r / r), t_r = sum_k w_k b_k^r with
    // integer weights; nullopt encodes a pole
    static std::optional<Scalar> contraction_value(
        const std::vector<std::pair<long, Scalar>>& wb);

    // the (weight, base) list of the contraction between fs[i]'s annihilation
    // half and fs[j]'s creation half
    std::vector<std::pair<long, Scalar>> contraction_terms(const VertexFactor& a,
                                                           const VertexFactor& b) const;

    Scalar level() const { return spec_.s(color_, fam_); }
    Family family() const { return fam_; }
    int color() const { return color_; }
    const Scalar& parameter() const { return v_; }
    const ParamSpec& spec() const { return spec_; }

private:
    // exp(sum_r b(r) h_{-r} z^r) applied at total creation degree m.
    Vec creation_exp(const BasisKey& key, long m, const std::function<Scalar(long)>& b) const;
    // exp(sum_r a(r) h_r z^{-r}) applied at total annihilation degree t.
    Vec annihilation_exp(const BasisKey& key, long t, const std::function<Scalar(long)>& a) const;
    Scalar h_action_scalar(long r) const; // scalar of h_r (r>0) as theta * d/dh_{-r}

    Scalar qa(long r = 1) const { return spec_.q(a_, fam_).pow(r); }
    Scalar qb(long r = 1) const { return spec_.q(b_, fam_).pow(r); }

    ParamSpec spec_;
    int color_, a_, b_;
    Scalar v_;
    Family fam_;
};

// Vector representation V_c(v) (left) with exact delta-supported actions.
// The right module V^R swaps the e and f routes at the handle level.
class VectorRepAction {
public:
    VectorRepAction(const ParamSpec& spec, int color, Scalar v, Family fam);

    Vec e_mode(long k, const BasisKey& key) const;
    Vec f_mode(long k, const BasisKey& key) const;
    Vec psi_mode(int sign, bool inverted, long k, const BasisKey& key) const;
    Vec h_mode(long r, const BasisKey& key) const;

    const ParamSpec& spec() const { return spec_; }

private:
    Scalar label_param(int i) const; // q_c^i v
    const DirectedSeries& omega_series(int sign, bool inverted) const;
    const DirectedSeries& log_omega_series(int sign) const;

    ParamSpec spec_;
    int color_;
    Scalar v_;
    Family fam_;
    mutable std::map<int, DirectedSeries> omega_cache_;
    mutable std::map<int, DirectedSeries> log_cache_;
};

} // namespace toroidal
