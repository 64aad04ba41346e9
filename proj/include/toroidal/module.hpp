#pragma once

#include "toroidal/atom.hpp"
#include "toroidal/basis.hpp"
#include "toroidal/fock.hpp"
#include "toroidal/param.hpp"
#include "toroidal/poly.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <tuple>

namespace toroidal {

// gAB(z,w) * A(z)B(w) = gBA(z,w) * B(w)A(z); both homogeneous bivariate.
struct ExchangeRule {
    Poly gAB, gBA;
};

class ModuleHandle {
public:
    virtual ~ModuleHandle() = default;

    virtual std::string describe() const = 0;
    virtual const ParamSpec& spec() const = 0;

    // Mode action of one generator on one basis element at a tensor leg
    // (empty path = the whole module).
    virtual Vec apply_key(const std::vector<int>& leg, const Atom& a, long mode,
                          const BasisKey& key) const = 0;

    virtual Scalar level(Family f) const = 0;   // C / Č
    virtual Scalar level_at(const std::vector<int>& leg, Family f) const;
    virtual Scalar psi0(Family f) const { return spec().psi0_scalar; }

    virtual bool admissible() const = 0;
    virtual long top_degree() const { return 0; }
    virtual long degree(const BasisKey& key) const { return key.degree(); }

    virtual bool atom_is_zero(const Atom& a) const = 0;
    virtual Sidedness sidedness(const Atom& a) const;

    virtual std::vector<BasisKey> basis(int cutoff) const = 0;

    // Handle owning the given tensor leg (nullptr when not resolvable, e.g.
    // through a twist wrapper). Used by the vertex-product fast path.
    virtual const ModuleHandle* leg_module(const std::vector<int>& leg) const {
        return leg.empty() ? this : nullptr;
    }

    // Memoized linear extension.
    Vec apply(const std::vector<int>& leg, const Atom& a, long mode, const Vec& v) const;
    Vec apply(const Atom& a, long mode, const Vec& v) const { return apply({}, a, mode, v); }

private:
    mutable std::mutex memo_mu_;
    mutable std::map<std::tuple<std::string, long, BasisKey>, Vec> memo_;
};

// Exchange data for atoms of one module (levels already substituted).
// nullopt when the pair has no polynomial exchange relation in scope.
std::optional<ExchangeRule> exchange_rule(const ParamSpec& spec, const Atom& A, const Atom& B,
                                          const Scalar& levelPlain, const Scalar& levelChecked);

// --- concrete handles ---------------------------------------------------

// Fock module F_color(v) of `realized` family; atoms of the other family act
// per the extended-module rules: e,f,X by zero, psi/k0 by the unit scalars.
class FockHandle : public ModuleHandle {
public:
    FockHandle(const ParamSpec& spec, int color, Scalar v, Family realized = Family::Plain);

    std::string describe() const override;
    const ParamSpec& spec() const override { return spec_; }
    Vec apply_key(const std::vector<int>& leg, const Atom& a, long mode,
                  const BasisKey& key) const override;
    Scalar level(Family f) const override;
    bool admissible() const override { return true; }
    bool atom_is_zero(const Atom& a) const override;
    std::vector<BasisKey> basis(int cutoff) const override;
    Family realized() const { return realized_; }
    int color() const { return act_.color(); }
    const Scalar& parameter() const { return act_.parameter(); }

private:
    ParamSpec spec_;
    FockAction act_;
    Family realized_;
};

// Vector representation V_color(v) or its right twin (e<->f swap; the checker
// reverses operator order for right modules).
class VectorHandle : public ModuleHandle {
public:
    enum class Side { Left, Right };
    VectorHandle(const ParamSpec& spec, int color, Scalar v, Side side);

    std::string describe() const override;
    const ParamSpec& spec() const override { return spec_; }
    Vec apply_key(const std::vector<int>& leg, const Atom& a, long mode,
                  const BasisKey& key) const override;
    Scalar level(Family f) const override { return Scalar(1); }
    bool admissible() const override { return false; }
    long top_degree() const override { throw TruncationUnsound("vector representation has no top degree"); }
    long degree(const BasisKey&) const override {
        throw TruncationUnsound("vector representation is not graded");
    }
    bool atom_is_zero(const Atom& a) const override;
    std::vector<BasisKey> basis(int cutoff) const override;
    Side side() const { return side_; }

private:
    ParamSpec spec_;
    VectorRepAction act_;
    Side side_;
};

// Tensor product with the Delta_1 coproduct action for both families.
class TensorHandle : public ModuleHandle {
public:
    TensorHandle(std::shared_ptr<const ModuleHandle> left, std::shared_ptr<const ModuleHandle> right);

    std::string describe() const override;
    const ParamSpec& spec() const override { return left_->spec(); }
    Vec apply_key(const std::vector<int>& leg, const Atom& a, long mode,
                  const BasisKey& key) const override;
    Scalar level(Family f) const override { return left_->level(f) * right_->level(f); }
    Scalar level_at(const std::vector<int>& leg, Family f) const override;
    bool admissible() const override { return left_->admissible() && right_->admissible(); }
    bool atom_is_zero(const Atom& a) const override;
    std::vector<BasisKey> basis(int cutoff) const override;

    const ModuleHandle& left() const { return *left_; }
    const ModuleHandle& right() const { return *right_; }
    const ModuleHandle* leg_module(const std::vector<int>& leg) const override;

private:
    std::shared_ptr<const ModuleHandle> left_, right_;
};

} // namespace toroidal
