#include "toroidal/fock.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <optional>

namespace toroidal {

std::vector<std::vector<int>> partitions_of(int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int rem, int maxpart) {
        if (rem == 0) {
            out.push_back(cur);
            return;
        }
        for (int p = std::min(rem, maxpart); p >= 1; --p) {
            cur.push_back(p);
            rec(rem - p, p);
            cur.pop_back();
        }
    };
    rec(n, n);
    return out;
}

namespace {

// Parts of a partition grouped as (size, multiplicity), sizes descending.
std::vector<std::pair<int, int>> grouped(const std::vector<int>& parts) {
    std::vector<std::pair<int, int>> g;
    for (int p : parts) {
        if (!g.empty() && g.back().first == p) ++g.back().second;
        else g.emplace_back(p, 1);
    }
    return g;
}

} // namespace

FockAction::FockAction(const ParamSpec& spec, int color, Scalar v, Family fam)
    : spec_(spec), color_(color), v_(std::move(v)), fam_(fam) {
    if (color < 1 || color > 3) throw std::invalid_argument("FockAction: color in {1,2,3}");
    if (v_.is_zero()) throw std::invalid_argument("FockAction: v must be nonzero");
    a_ = color == 1 ? 2 : 1;
    b_ = color == 3 ? 2 : 3;
}

Scalar FockAction::h_action_scalar(long r) const {
    // h_r (r>0) acts by -(r s_c^r (1-q_a^r)(1-q_b^r))^{-1} d/dh_{-r}
    Scalar one(1);
    Scalar d = Scalar(r) * spec_.s(color_, fam_).pow(r) * (one - qa(r)) * (one - qb(r));
    return -d.inv();
}

Vec FockAction::creation_exp(const BasisKey& key, long m, const std::function<Scalar(long)>& b) const {
    Vec out;
    if (m < 0) return out;
    const std::vector<int>& parts = key.parts();
    std::vector<int> added;
    // {p_r >= 0 : sum r p_r = m}, coefficient prod b(r)^{p_r} / p_r!
    std::function<void(long, long, Scalar)> rec = [&](long rem, long maxr, Scalar coef) {
        if (rem == 0) {
            std::vector<int> np = parts;
            np.insert(np.end(), added.begin(), added.end());
            out.add(BasisKey::partition(np), coef);
            return;
        }
        if (maxr < 1) return;
        rec(rem, maxr - 1, coef); // multiplicity 0 for part maxr
        Scalar c = coef;
        std::size_t base = added.size();
        for (long n = 1; maxr * n <= rem; ++n) {
            c *= b(maxr) / Scalar(n);
            added.push_back(static_cast<int>(maxr));
            rec(rem - maxr * n, maxr - 1, c);
        }
        added.resize(base);
    };
    rec(m, m, Scalar(1));
    return out;
}

Vec FockAction::annihilation_exp(const BasisKey& key, long t, const std::function<Scalar(long)>& a) const {
    Vec out;
    if (t < 0) return out;
    auto groups = grouped(key.parts());
    std::vector<int> removals(groups.size(), 0);
    // {0 <= n_i <= mult_i : sum r_i n_i = t};
    // coefficient prod (a(r_i) theta_{r_i})^{n_i} / n_i! * mult_i!/(mult_i-n_i)!
    std::function<void(std::size_t, long, Scalar)> rec = [&](std::size_t idx, long rem, Scalar coef) {
        if (rem == 0) {
            std::vector<int> np;
            for (std::size_t i = 0; i < groups.size(); ++i)
                for (int n = 0; n < groups[i].second - (i < removals.size() ? removals[i] : 0); ++n)
                    np.push_back(groups[i].first);
            // also keep untouched groups beyond idx
            out.add(BasisKey::partition(np), coef);
            return;
        }
        if (idx >= groups.size()) return;
        auto [r, mult] = groups[idx];
        Scalar step = a(r) * h_action_scalar(r);
        Scalar c = coef;
        long avail = mult;
        for (long n = 0; n <= avail && r * n <= rem; ++n) {
            if (n > 0) c *= step * Scalar(avail - n + 1) / Scalar(n);
            removals[idx] = static_cast<int>(n);
            rec(idx + 1, rem - r * n, c);
        }
        removals[idx] = 0;
    };
    rec(0, t, Scalar(1));
    return out;
}

Vec FockAction::e_mode(long k, const BasisKey& key) const {
    Scalar one(1);
    Scalar A = spec_.s(color_, fam_).inv() / ((one - qa()) * (one - qb()));
    Scalar sc = spec_.s(color_, fam_);
    auto cre = [&](long r) { return (one - qa(r)) * (one - qb(r)) * v_.pow(r); };
    auto ann = [&](long r) {
        return (one - qa(-r)) * (one - qb(-r)) * sc.pow(-r) * v_.pow(-r);
    };
    long d = -key.degree();
    if (k < -64) throw std::logic_error("e_mode: mode " + std::to_string(k) + " suspiciously low");
    Vec out;
    for (long t = std::max(0L, k); t <= d; ++t) {
        Vec mid = annihilation_exp(key, t, ann);
        for (auto& [mk, mc] : mid.terms()) {
            Vec top = creation_exp(mk, t - k, cre);
            out += top *= mc;
        }
    }
    out *= A;
    return out;
}

Vec FockAction::f_mode(long k, const BasisKey& key) const {
    Scalar one(1);
    Scalar B = -spec_.s(color_, fam_).inv() / ((one - qa()) * (one - qb()));
    Scalar sc = spec_.s(color_, fam_);
    auto cre = [&](long r) { return -(one - qa(r)) * (one - qb(r)) * sc.pow(r) * v_.pow(r); };
    auto ann = [&](long r) { return -(one - qa(-r)) * (one - qb(-r)) * v_.pow(-r); };
    long d = -key.degree();
    Vec out;
    for (long t = std::max(0L, k); t <= d; ++t) {
        Vec mid = annihilation_exp(key, t, ann);
        for (auto& [mk, mc] : mid.terms()) {
            Vec top = creation_exp(mk, t - k, cre);
            out += top *= mc;
        }
    }
    out *= B;
    return out;
}

Vec FockAction::psi_mode(int sign, bool inverted, long k, const BasisKey& key) const {
    Scalar psi0 = spec_.psi0_scalar;
    Scalar pref = sign > 0 ? psi0 : psi0.inv();
    if (inverted) pref = pref.inv();
    Scalar flip(inverted ? -1 : 1);
    Vec out;
    if (sign > 0) {
        if (k < 0) return out;
        auto ann = [&](long r) { return flip * spec_.kappa(r, fam_) * v_.pow(-r); };
        out = annihilation_exp(key, k, ann);
    } else {
        if (k > 0) return out;
        auto cre = [&](long r) { return flip * spec_.kappa(r, fam_) * v_.pow(r); };
        out = creation_exp(key, -k, cre);
    }
    out *= pref;
    return out;
}

Vec FockAction::k0_mode(int sign, bool inverted, long k, const BasisKey& key) const {
    Scalar one(1);
    Scalar K = fam_ == Family::Plain ? spec_.K_scalar : spec_.Kcheck_scalar;
    Scalar pref = sign > 0 ? K : K.inv();
    if (inverted) pref = pref.inv();
    Scalar flip(inverted ? -1 : 1);
    Scalar q1 = spec_.q(1, fam_);
    Vec out;
    if (sign > 0) {
        if (k < 0) return out;
        auto ann = [&](long r) {
            return flip * spec_.kappa(r, fam_) * v_.pow(-r) / (q1.pow(-r) - one);
        };
        out = annihilation_exp(key, k, ann);
    } else {
        if (k > 0) return out;
        auto cre = [&](long r) {
            return flip * spec_.kappa(r, fam_) * v_.pow(r) / (q1.pow(r) - one);
        };
        out = creation_exp(key, -k, cre);
    }
    out *= pref;
    return out;
}

Vec FockAction::h_mode(long r, const BasisKey& key) const {
    if (r == 0) throw std::invalid_argument("FockAction::h_mode: r != 0");
    Vec out;
    if (r < 0) {
        std::vector<int> np = key.parts();
        np.push_back(static_cast<int>(-r));
        out.add(BasisKey::partition(np), v_.pow(-r));
        return out;
    }
    auto groups = grouped(key.parts());
    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (groups[i].first != r) continue;
        std::vector<int> np;
        bool removed = false;
        for (int p : key.parts()) {
            if (!removed && p == static_cast<int>(r)) { removed = true; continue; }
            np.push_back(p);
        }
        out.add(BasisKey::partition(np),
                h_action_scalar(r) * Scalar(groups[i].second) * v_.pow(-r));
    }
    return out;
}

VectorRepAction::VectorRepAction(const ParamSpec& spec, int color, Scalar v, Family fam)
    : spec_(spec), color_(color), v_(std::move(v)), fam_(fam) {
    if (v_.is_zero()) throw std::invalid_argument("VectorRepAction: v must be nonzero");
}

Scalar VectorRepAction::label_param(int i) const { return spec_.q(color_, fam_).pow(i) * v_; }

const DirectedSeries& VectorRepAction::omega_series(int sign, bool inverted) const {
    int key = sign * (inverted ? 2 : 1);
    auto it = omega_cache_.find(key);
    if (it != omega_cache_.end()) return it->second;
    auto om = spec_.omega(fam_);
    if (inverted) om = RationalFunction1(om.den(), om.num());
    long order = 64; // far beyond any window the suites request
    auto s = om.expand(sign > 0 ? Direction::AtZero : Direction::AtInfinity, order);
    return omega_cache_.emplace(key, std::move(s)).first->second;
}

const DirectedSeries& VectorRepAction::log_omega_series(int sign) const {
    auto it = log_cache_.find(sign);
    if (it != log_cache_.end()) return it->second;
    auto l = omega_series(sign, false).log();
    return log_cache_.emplace(sign, std::move(l)).first->second;
}

Vec VectorRepAction::e_mode(long k, const BasisKey& key) const {
    int i = key.label_value();
    Scalar s = spec_.s(color_, fam_);
    Vec out;
    out.add(BasisKey::label(i + 1), label_param(i).pow(k) / (s.inv() - s));
    return out;
}

Vec VectorRepAction::f_mode(long k, const BasisKey& key) const {
    int i = key.label_value();
    Scalar s = spec_.s(color_, fam_);
    Vec out;
    out.add(BasisKey::label(i - 1), label_param(i - 1).pow(k) / (s.inv() - s));
    return out;
}

Vec VectorRepAction::psi_mode(int sign, bool inverted, long k, const BasisKey& key) const {
    Vec out;
    if ((sign > 0 && k < 0) || (sign < 0 && k > 0)) return out; // one-sided current
    auto& series = omega_series(sign, inverted);
    auto c = series.coeff(k);
    if (!c) throw std::logic_error("VectorRepAction: psi mode outside precomputed window");
    if (c->is_zero()) return out;
    out.add(key, *c * label_param(key.label_value()).pow(k));
    return out;
}

Vec VectorRepAction::h_mode(long r, const BasisKey& key) const {
    if (r == 0) throw std::invalid_argument("VectorRepAction::h_mode: r != 0");
    auto& l = log_omega_series(r > 0 ? +1 : -1);
    auto c = l.coeff(r);
    if (!c) throw std::logic_error("VectorRepAction: h mode outside precomputed window");
    Vec out;
    Scalar val = *c * label_param(key.label_value()).pow(r) / spec_.kappa(std::labs(r), fam_);
    out.add(key, val);
    return out;
}

// --- normal-ordered vertex-operator products --------------------------------

FockAction::VertexFactor FockAction::vertex_factor(AtomKind kind, bool inverted,
                                                   const Scalar& arg) const {
    Scalar one(1);
    Scalar sc = spec_.s(color_, fam_);
    Scalar qas = qa(), qbs = qb();
    Scalar q1 = spec_.q(1, fam_);
    Scalar q2o = spec_.q(2, fam_), q3o = spec_.q(3, fam_);
    VertexFactor f;
    f.arg = arg;
    Scalar flip(inverted ? -1 : 1);
    switch (kind) {
    case AtomKind::E: {
        if (inverted) throw UnsupportedAtom("e is not invertible");
        f.prefactor = sc.inv() / ((one - qas) * (one - qbs));
        f.cre = [this, one](long r) { return (one - qa(r)) * (one - qb(r)) * v_.pow(r); };
        f.ann = [this, one, sc](long r) {
            return (one - qa(-r)) * (one - qb(-r)) * sc.pow(-r) * v_.pow(-r);
        };
        f.cre_w = one;
        f.cre_base = v_;
        f.cre_factors = {qas, qbs};
        f.ann_w = one;
        f.ann_base = (sc * v_).inv();
        f.ann_factors = {qas.inv(), qbs.inv()};
        break;
    }
    case AtomKind::F: {
        if (inverted) throw UnsupportedAtom("f is not invertible");
        f.prefactor = -sc.inv() / ((one - qas) * (one - qbs));
        f.cre = [this, one, sc](long r) {
            return -(one - qa(r)) * (one - qb(r)) * sc.pow(r) * v_.pow(r);
        };
        f.ann = [this, one](long r) { return -(one - qa(-r)) * (one - qb(-r)) * v_.pow(-r); };
        f.cre_w = -one;
        f.cre_base = sc * v_;
        f.cre_factors = {qas, qbs};
        f.ann_w = -one;
        f.ann_base = v_.inv();
        f.ann_factors = {qas.inv(), qbs.inv()};
        break;
    }
    case AtomKind::PsiP: {
        Scalar psi0 = spec_.psi0_scalar;
        f.prefactor = inverted ? psi0.inv() : psi0;
        f.cre_zero = true;
        f.ann = [this, flip](long r) { return flip * spec_.kappa(r, fam_) * v_.pow(-r); };
        f.ann_w = flip;
        f.ann_base = v_.inv();
        f.ann_factors = {spec_.q(1, fam_), spec_.q(2, fam_), spec_.q(3, fam_)};
        break;
    }
    case AtomKind::PsiM: {
        Scalar psi0 = spec_.psi0_scalar;
        f.prefactor = inverted ? psi0 : psi0.inv();
        f.ann_zero = true;
        f.cre = [this, flip](long r) { return flip * spec_.kappa(r, fam_) * v_.pow(r); };
        f.cre_w = flip;
        f.cre_base = v_;
        f.cre_factors = {spec_.q(1, fam_), spec_.q(2, fam_), spec_.q(3, fam_)};
        break;
    }
    case AtomKind::K0P: {
        Scalar K = fam_ == Family::Plain ? spec_.K_scalar : spec_.Kcheck_scalar;
        f.prefactor = inverted ? K.inv() : K;
        f.cre_zero = true;
        // kappa_r / (q1^{-r} - 1) = q1^r (1-q2^r)(1-q3^r)
        f.ann = [this, flip, q1, one](long r) {
            return flip * spec_.kappa(r, fam_) * v_.pow(-r) / (q1.pow(-r) - one);
        };
        f.ann_w = flip;
        f.ann_base = q1 / v_;
        f.ann_factors = {q2o, q3o};
        break;
    }
    case AtomKind::K0M: {
        Scalar K = fam_ == Family::Plain ? spec_.K_scalar : spec_.Kcheck_scalar;
        f.prefactor = inverted ? K : K.inv();
        f.ann_zero = true;
        // kappa_r / (q1^r - 1) = -(1-q2^r)(1-q3^r)
        f.cre = [this, flip, q1, one](long r) {
            return flip * spec_.kappa(r, fam_) * v_.pow(r) / (q1.pow(r) - one);
        };
        f.cre_w = -flip;
        f.cre_base = v_;
        f.cre_factors = {q2o, q3o};
        break;
    }
    default:
        throw UnsupportedAtom("vertex_factor: not an exponential current");
    }
    return f;
}

std::vector<std::pair<long, Scalar>> FockAction::contraction_terms(const VertexFactor& a,
                                                                   const VertexFactor& b) const {
    std::vector<std::pair<long, Scalar>> out;
    if (a.ann_zero || b.cre_zero) return out;
    Scalar one(1);
    // t_r = ann_a(r) a.arg^{-r} * cre_b(r) b.arg^{r} * theta_r, with
    // theta_r = -1/(r s_c^r (1-q_a^r)(1-q_b^r)); collect the factored pieces.
    Scalar weight = -(a.ann_w * b.cre_w); // theta's overall minus
    Scalar base = a.ann_base * b.cre_base * (b.arg / a.arg) / spec_.s(color_, fam_);
    std::vector<Scalar> numer = a.ann_factors;
    numer.insert(numer.end(), b.cre_factors.begin(), b.cre_factors.end());
    std::vector<Scalar> denom = {qa(), qb()};

    auto canon = [&](std::vector<Scalar>& fs, bool numerator) {
        for (auto& mu : fs) {
            if (abs(mu.raw()) > 1) {
                // (1 - mu^r) = -mu^r (1 - (1/mu)^r)
                if (numerator) {
                    weight = -weight;
                    base = base * mu;
                } else {
                    weight = -weight;
                    base = base / mu;
                }
                mu = mu.inv();
            }
        }
    };
    canon(numer, true);
    canon(denom, false);
    // cancel the denominator factors
    for (auto& d : denom) {
        auto it = std::find(numer.begin(), numer.end(), d);
        if (it == numer.end())
            throw std::logic_error("contraction: theta denominator does not cancel");
        numer.erase(it);
    }
    // expand prod (1 - mu^r) = sum over subsets
    long w0;
    {
        // the weight must be an integer for the resummed product to be rational
        mpq_class w = weight.raw();
        if (w.get_den() != 1) throw std::logic_error("contraction: non-integer weight");
        if (!w.get_num().fits_slong_p()) throw std::logic_error("contraction: weight overflow");
        w0 = w.get_num().get_si();
    }
    std::size_t n = numer.size();
    for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
        long w = w0;
        Scalar bb = base;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (std::size_t(1) << i)) {
                w = -w;
                bb *= numer[i];
            }
        out.emplace_back(w, bb);
    }
    return out;
}

std::optional<Scalar> FockAction::contraction_value(
    const std::vector<std::pair<long, Scalar>>& wb) {
    // exp(sum_r (sum_k w_k b_k^r)/r) = prod_k (1 - b_k)^{-w_k}
    Scalar acc(1);
    Scalar one(1);
    for (auto& [w, b] : wb) {
        Scalar f = one - b;
        if (f.is_zero()) {
            if (w < 0) return Scalar(0); // (1-1)^{-w} with -w > 0 -> zero factor
            return std::nullopt;         // pole
        }
        acc *= f.pow(-w);
    }
    return acc;
}

Vec FockAction::product_mode(const std::vector<VertexFactor>& fs, long k,
                             const BasisKey& key) const {
    Scalar pref(1);
    for (auto& f : fs) pref *= f.prefactor;
    for (std::size_t i = 0; i < fs.size(); ++i)
        for (std::size_t j = i + 1; j < fs.size(); ++j) {
            auto val = contraction_value(contraction_terms(fs[i], fs[j]));
            if (!val) throw std::domain_error("fused vertex product has a contraction pole");
            pref *= *val;
            if (pref.is_zero()) return {};
        }
    auto cre = [&](long r) {
        Scalar acc(0);
        for (auto& f : fs)
            if (!f.cre_zero) acc += f.cre(r) * f.arg.pow(r);
        return acc;
    };
    auto ann = [&](long r) {
        Scalar acc(0);
        for (auto& f : fs)
            if (!f.ann_zero) acc += f.ann(r) * f.arg.pow(-r);
        return acc;
    };
    long d = -key.degree();
    Vec out;
    for (long t = std::max(0L, k); t <= d; ++t) {
        Vec mid = annihilation_exp(key, t, ann);
        for (auto& [mk, mc] : mid.terms()) {
            Vec top = creation_exp(mk, t - k, cre);
            out += top *= mc;
        }
    }
    out *= pref;
    return out;
}

} // namespace toroidal
