#include "toroidal/module.hpp"

#include <fmt/format.h>

namespace toroidal {

std::string Atom::str() const {
    const char* k = "?";
    switch (kind) {
    case AtomKind::E: k = "e"; break;
    case AtomKind::F: k = "f"; break;
    case AtomKind::PsiP: k = "psi+"; break;
    case AtomKind::PsiM: k = "psi-"; break;
    case AtomKind::K0P: k = "k0+"; break;
    case AtomKind::K0M: k = "k0-"; break;
    case AtomKind::H: k = "h"; break;
    case AtomKind::Xp: k = "X+"; break;
    case AtomKind::Xm: k = "X-"; break;
    }
    std::string s = fam == Family::Checked ? std::string(k) + "'" : std::string(k);
    if (kind == AtomKind::H) s += fmt::format("[{}]", idx);
    if (kind == AtomKind::Xp || kind == AtomKind::Xm) s += fmt::format("[{}/2]", idx);
    if (inverted) s += "^-1";
    return s;
}

Scalar ModuleHandle::level_at(const std::vector<int>& leg, Family f) const {
    if (!leg.empty()) throw std::logic_error("level_at: leaf module has no legs");
    return level(f);
}

Sidedness ModuleHandle::sidedness(const Atom& a) const {
    if (atom_is_zero(a)) return Sidedness::Zero;
    switch (a.kind) {
    case AtomKind::PsiP:
    case AtomKind::K0P: return Sidedness::ModesGE0;
    case AtomKind::PsiM:
    case AtomKind::K0M: return Sidedness::ModesLE0;
    default: return Sidedness::TwoSided;
    }
}

Vec ModuleHandle::apply(const std::vector<int>& leg, const Atom& a, long mode, const Vec& v) const {
    Vec out;
    std::string sig = a.str();
    for (int x : leg) sig += fmt::format(".{}", x);
    for (auto& [key, c] : v.terms()) {
        bool hit = false;
        Vec term;
        {
            std::scoped_lock lk(memo_mu_);
            auto it = memo_.find({sig, mode, key});
            if (it != memo_.end()) {
                term = it->second;
                hit = true;
            }
        }
        if (!hit) {
            term = apply_key(leg, a, mode, key);
            std::scoped_lock lk(memo_mu_);
            memo_.emplace(std::make_tuple(sig, mode, key), term);
        }
        out += term *= c;
    }
    return out;
}

// --- exchange rules ------------------------------------------------------

namespace {

Poly prod_z_minus(const std::vector<Scalar>& cs) {
    Poly p = Poly::constant(2, Scalar(1));
    for (auto& c : cs) p *= z_minus(c);
    return p;
}
Poly prod_w_minus(const std::vector<Scalar>& cs) {
    Poly p = Poly::constant(2, Scalar(1));
    for (auto& c : cs) p *= w_minus(c);
    return p;
}

} // namespace

std::optional<ExchangeRule> exchange_rule(const ParamSpec& spec, const Atom& A, const Atom& B,
                                          const Scalar& levelPlain, const Scalar& levelChecked) {
    using K = AtomKind;
    if (A.kind == K::H || B.kind == K::H) return std::nullopt;
    if (A.kind == K::Xp || A.kind == K::Xm || B.kind == K::Xp || B.kind == K::Xm)
        return std::nullopt;
    Poly one = Poly::constant(2, Scalar(1));
    if (A.fam != B.fam) return ExchangeRule{one, one}; // the two families commute

    Family f = A.fam;
    Scalar q1 = spec.q(1, f), q2 = spec.q(2, f), q3 = spec.q(3, f);
    Scalar C = f == Family::Plain ? levelPlain : levelChecked;
    std::vector<Scalar> qs = {q1, q2, q3};
    Scalar one_s(1);

    auto is = [&](K x, K y) { return A.kind == x && B.kind == y; };
    // substitutions z -> cz*z, w -> cw*w
    auto gz = [&](const std::vector<Scalar>& cs, Scalar cz, Scalar cw) {
        return prod_z_minus(cs).scale_vars({cz, cw});
    };
    auto gw = [&](const std::vector<Scalar>& cs, Scalar cz, Scalar cw) {
        return prod_w_minus(cs).scale_vars({cz, cw});
    };

    if (is(K::E, K::E)) return ExchangeRule{gz(qs, one_s, one_s), -gw(qs, one_s, one_s)};
    if (is(K::F, K::F)) return ExchangeRule{gw(qs, one_s, one_s), -gz(qs, one_s, one_s)};
    if (is(K::E, K::F) || is(K::F, K::E)) return std::nullopt; // ef has delta terms

    // psi / e   (g(C^{(1±1)/2}z,w) psi^±(z) e(w) + g(w, C^{(1±1)/2}z) e(w) psi^±(z) = 0)
    if (is(K::PsiP, K::E)) return ExchangeRule{gz(qs, C, one_s), -gw(qs, C, one_s)};
    if (is(K::E, K::PsiP)) return ExchangeRule{gz(qs, one_s, C), -gw(qs, one_s, C)};
    if (is(K::PsiM, K::E)) return ExchangeRule{gz(qs, one_s, one_s), -gw(qs, one_s, one_s)};
    if (is(K::E, K::PsiM)) return ExchangeRule{gz(qs, one_s, one_s), -gw(qs, one_s, one_s)};
    // psi / f   (g(w, C^{(1∓1)/2}z) psi^±(z) f(w) + g(C^{(1∓1)/2}z, w) f(w) psi^±(z) = 0)
    if (is(K::PsiP, K::F)) return ExchangeRule{gw(qs, one_s, one_s), -gz(qs, one_s, one_s)};
    if (is(K::F, K::PsiP)) return ExchangeRule{gw(qs, one_s, one_s), -gz(qs, one_s, one_s)};
    if (is(K::PsiM, K::F)) return ExchangeRule{gw(qs, C, one_s), -gz(qs, C, one_s)};
    if (is(K::F, K::PsiM)) return ExchangeRule{gw(qs, one_s, C), -gz(qs, one_s, C)};

    // e / k0 and f / k0: cleared forms of the omega exchange identities.
    if (is(K::E, K::K0P))
        return ExchangeRule{prod_z_minus({C, q1.inv() * C}), prod_z_minus({q2 * C, q3 * C})};
    if (is(K::K0P, K::E))
        return ExchangeRule{prod_w_minus({q2 * C, q3 * C}), prod_w_minus({C, q1.inv() * C})};
    if (is(K::E, K::K0M))
        return ExchangeRule{prod_z_minus({one_s, q1.inv()}), prod_z_minus({q2, q3})};
    if (is(K::K0M, K::E))
        return ExchangeRule{prod_w_minus({q2, q3}), prod_w_minus({one_s, q1.inv()})};
    if (is(K::K0P, K::F))
        return ExchangeRule{prod_w_minus({one_s, q1.inv()}), prod_w_minus({q2, q3})};
    if (is(K::F, K::K0P))
        return ExchangeRule{prod_z_minus({q2, q3}), prod_z_minus({one_s, q1.inv()})};
    if (is(K::K0M, K::F))
        return ExchangeRule{prod_w_minus({C, q1.inv() * C}), prod_w_minus({q2 * C, q3 * C})};
    if (is(K::F, K::K0M))
        return ExchangeRule{prod_z_minus({q2 * C, q3 * C}), prod_z_minus({C, q1.inv() * C})};

    auto plus_side = [](K k) { return k == K::PsiP || k == K::K0P; };
    auto minus_side = [](K k) { return k == K::PsiM || k == K::K0M; };
    if ((plus_side(A.kind) && plus_side(B.kind)) || (minus_side(A.kind) && minus_side(B.kind)))
        return ExchangeRule{one, one}; // same-sided Heisenberg exponentials commute

    // psi+ / psi- : cleared form of the g-ratio relation.
    if (is(K::PsiP, K::PsiM))
        return ExchangeRule{gz(qs, one_s, C.inv()) * gw(qs, one_s, C),
                            gw(qs, one_s, C.inv()) * gz(qs, one_s, C)};
    if (is(K::PsiM, K::PsiP))
        return ExchangeRule{gz(qs, C.inv(), one_s) * gw(qs, C, one_s),
                            gw(qs, C.inv(), one_s) * gz(qs, C, one_s)};

    return std::nullopt;
}

// --- FockHandle -----------------------------------------------------------

FockHandle::FockHandle(const ParamSpec& spec, int color, Scalar v, Family realized)
    : spec_(spec), act_(spec_, color, std::move(v), realized), realized_(realized) {}

std::string FockHandle::describe() const {
    return fmt::format("{}F{}({})", realized_ == Family::Checked ? "check" : "", act_.color(),
                       act_.parameter().str());
}

Scalar FockHandle::level(Family f) const {
    return f == realized_ ? act_.level() : Scalar(1);
}

bool FockHandle::atom_is_zero(const Atom& a) const {
    if (a.kind == AtomKind::Xp || a.kind == AtomKind::Xm) return true;
    if (a.fam != realized_ && (a.kind == AtomKind::E || a.kind == AtomKind::F)) return true;
    return false;
}

Vec FockHandle::apply_key(const std::vector<int>& leg, const Atom& a, long mode,
                          const BasisKey& key) const {
    if (!leg.empty()) throw std::logic_error("FockHandle: no tensor legs");
    if (atom_is_zero(a)) return {};
    if (a.fam != realized_) {
        // Extended-module rules: the other family's Cartan currents are unit
        // scalars (psi' == 1, k0'^± == K'^{±1}), h'_r == 0.
        Vec out;
        if (a.kind == AtomKind::H) return out;
        if (mode != 0) return out;
        Scalar c(1);
        if (a.kind == AtomKind::K0P || a.kind == AtomKind::K0M) {
            Scalar K = a.fam == Family::Plain ? spec_.K_scalar : spec_.Kcheck_scalar;
            int e = (a.kind == AtomKind::K0P ? 1 : -1) * (a.inverted ? -1 : 1);
            c = K.pow(e);
        }
        out.add(key, c);
        return out;
    }
    switch (a.kind) {
    case AtomKind::E:
        if (a.inverted) throw UnsupportedAtom("e is not invertible");
        return act_.e_mode(mode, key);
    case AtomKind::F:
        if (a.inverted) throw UnsupportedAtom("f is not invertible");
        return act_.f_mode(mode, key);
    case AtomKind::PsiP: return act_.psi_mode(+1, a.inverted, mode, key);
    case AtomKind::PsiM: return act_.psi_mode(-1, a.inverted, mode, key);
    case AtomKind::K0P: return act_.k0_mode(+1, a.inverted, mode, key);
    case AtomKind::K0M: return act_.k0_mode(-1, a.inverted, mode, key);
    case AtomKind::H:
        if (mode != 0) return {};
        return act_.h_mode(a.idx, key);
    default: throw UnsupportedAtom("FockHandle: unsupported atom " + a.str());
    }
}

std::vector<BasisKey> FockHandle::basis(int cutoff) const {
    std::vector<BasisKey> out;
    for (int d = 0; d <= cutoff; ++d)
        for (auto& p : partitions_of(d)) out.push_back(BasisKey::partition(p));
    return out;
}

// --- VectorHandle ---------------------------------------------------------

VectorHandle::VectorHandle(const ParamSpec& spec, int color, Scalar v, Side side)
    : spec_(spec), act_(spec_, color, std::move(v), Family::Plain), side_(side) {}

std::string VectorHandle::describe() const {
    return fmt::format("V{}{}", 1, side_ == Side::Right ? "^R" : "");
}

bool VectorHandle::atom_is_zero(const Atom&) const { return false; }

Vec VectorHandle::apply_key(const std::vector<int>& leg, const Atom& a, long mode,
                            const BasisKey& key) const {
    if (!leg.empty()) throw std::logic_error("VectorHandle: no tensor legs");
    if (a.fam != Family::Plain) throw UnsupportedAtom("vector representation: plain family only");
    bool swap = side_ == Side::Right;
    switch (a.kind) {
    case AtomKind::E: return swap ? act_.f_mode(mode, key) : act_.e_mode(mode, key);
    case AtomKind::F: return swap ? act_.e_mode(mode, key) : act_.f_mode(mode, key);
    case AtomKind::PsiP: return act_.psi_mode(+1, a.inverted, mode, key);
    case AtomKind::PsiM: return act_.psi_mode(-1, a.inverted, mode, key);
    case AtomKind::H:
        if (mode != 0) return {};
        return act_.h_mode(a.idx, key);
    default: throw UnsupportedAtom("VectorHandle: unsupported atom " + a.str());
    }
}

std::vector<BasisKey> VectorHandle::basis(int cutoff) const {
    std::vector<BasisKey> out;
    for (int i = -cutoff; i <= cutoff; ++i) out.push_back(BasisKey::label(i));
    return out;
}

// --- TensorHandle ---------------------------------------------------------

TensorHandle::TensorHandle(std::shared_ptr<const ModuleHandle> left,
                           std::shared_ptr<const ModuleHandle> right)
    : left_(std::move(left)), right_(std::move(right)) {
    if (!left_->admissible() || !right_->admissible())
        throw TruncationUnsound("tensor factors must be admissible");
}

std::string TensorHandle::describe() const {
    return fmt::format("({})x({})", left_->describe(), right_->describe());
}

Scalar TensorHandle::level_at(const std::vector<int>& leg, Family f) const {
    if (leg.empty()) return level(f);
    std::vector<int> rest(leg.begin() + 1, leg.end());
    return leg.front() == 0 ? left_->level_at(rest, f) : right_->level_at(rest, f);
}

bool TensorHandle::atom_is_zero(const Atom& a) const {
    if (a.kind == AtomKind::Xp || a.kind == AtomKind::Xm)
        throw UnsupportedAtom("TensorHandle: X atoms live on AN modules");
    if (a.kind == AtomKind::E || a.kind == AtomKind::F)
        return left_->atom_is_zero(a) && right_->atom_is_zero(a);
    return false;
}

Vec TensorHandle::apply_key(const std::vector<int>& leg, const Atom& a, long mode,
                            const BasisKey& key) const {
    if (key.kind() != BasisKey::Kind::Pair) throw std::logic_error("TensorHandle: pair key expected");
    const BasisKey& ka = key.left();
    const BasisKey& kb = key.right();

    if (!leg.empty()) {
        std::vector<int> rest(leg.begin() + 1, leg.end());
        Vec out;
        if (leg.front() == 0) {
            Vec sub = left_->apply(rest, a, mode, Vec::unit(ka));
            for (auto& [k, c] : sub.terms()) out.add(BasisKey::pair(k, kb), c);
        } else {
            Vec sub = right_->apply(rest, a, mode, Vec::unit(kb));
            for (auto& [k, c] : sub.terms()) out.add(BasisKey::pair(ka, k), c);
        }
        return out;
    }

    auto tensor = [&](const Vec& va, const Vec& vb, Vec& out, const Scalar& c) {
        for (auto& [x, cx] : va.terms())
            for (auto& [y, cy] : vb.terms()) out.add(BasisKey::pair(x, y), c * cx * cy);
    };
    Family f = a.fam;
    Scalar C1 = left_->level(f), C2 = right_->level(f);
    long db = right_->degree(kb);
    long Tb = right_->top_degree();
    Vec out;

    auto onL = [&](AtomKind k, bool inv, long md) {
        return left_->apply({}, Atom::make(f, k, 0, inv), md, Vec::unit(ka));
    };
    auto onR = [&](AtomKind k, bool inv, long md) {
        return right_->apply({}, Atom::make(f, k, 0, inv), md, Vec::unit(kb));
    };

    switch (a.kind) {
    case AtomKind::E: {
        // Delta e(z) = e(z) ⊗ 1 + psi^-(z) ⊗ e(C1 z)
        tensor(onL(AtomKind::E, false, mode), Vec::unit(kb), out, Scalar(1));
        for (long j = 0; j >= mode - (Tb - db); --j) {
            Vec pa = onL(AtomKind::PsiM, false, j);
            if (pa.is_zero()) continue;
            Vec eb = onR(AtomKind::E, false, mode - j);
            tensor(pa, eb, out, C1.pow(-(mode - j)));
        }
        break;
    }
    case AtomKind::F: {
        // Delta f(z) = f(C2 z) ⊗ psi^+(z) + 1 ⊗ f(z)
        tensor(Vec::unit(ka), onR(AtomKind::F, false, mode), out, Scalar(1));
        for (long j = 0; j <= Tb - db; ++j) {
            Vec pb = onR(AtomKind::PsiP, false, j);
            if (pb.is_zero()) continue;
            Vec fa = onL(AtomKind::F, false, mode - j);
            tensor(fa, pb, out, C2.pow(-(mode - j)));
        }
        break;
    }
    case AtomKind::PsiP:
    case AtomKind::K0P: {
        // a(C2 z) ⊗ a(z): both factors have modes >= 0
        if (mode < 0) break;
        for (long j = 0; j <= mode; ++j) {
            Vec xa = onL(a.kind, a.inverted, j);
            if (xa.is_zero()) continue;
            Vec xb = onR(a.kind, a.inverted, mode - j);
            tensor(xa, xb, out, C2.pow(-j));
        }
        break;
    }
    case AtomKind::PsiM:
    case AtomKind::K0M: {
        // a(z) ⊗ a(C1 z): both factors have modes <= 0
        if (mode > 0) break;
        for (long j = mode; j <= 0; ++j) {
            Vec xa = onL(a.kind, a.inverted, j);
            if (xa.is_zero()) continue;
            Vec xb = onR(a.kind, a.inverted, mode - j);
            tensor(xa, xb, out, C1.pow(-(mode - j)));
        }
        break;
    }
    case AtomKind::H:
        throw UnsupportedAtom("TensorHandle: h_r has no lifted action in scope");
    default:
        throw UnsupportedAtom("TensorHandle: unsupported atom " + a.str());
    }
    return out;
}

const ModuleHandle* TensorHandle::leg_module(const std::vector<int>& leg) const {
    if (leg.empty()) return this;
    std::vector<int> rest(leg.begin() + 1, leg.end());
    return leg.front() == 0 ? left_->leg_module(rest) : right_->leg_module(rest);
}

std::vector<BasisKey> TensorHandle::basis(int cutoff) const {
    std::vector<BasisKey> out;
    auto la = left_->basis(cutoff);
    auto lb = right_->basis(cutoff);
    for (auto& x : la)
        for (auto& y : lb)
            if (left_->degree(x) + right_->degree(y) >= -cutoff)
                out.push_back(BasisKey::pair(x, y));
    return out;
}

} // namespace toroidal
