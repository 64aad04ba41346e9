#pragma once

#include "toroidal/currents.hpp"
#include "toroidal/module.hpp"

namespace toroidal {

struct BadIndexParity : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IncompatibleLevels : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExtSide { Left, Right };
enum class TwistKind { IndexShift, Automorphism, Switch };

// Admissible A_N modules built from the paper's ingredients: the two Fock A_1
// base modules, iterated tensor extensions (left via the coproduct theorem,
// right via its A^- companion composed with the index-shift relabeling), and
// the three twist functors. X indices are doubled integers so half-integer
// labels stay exact; the parity rule tracks N and the applied relabelings.
class ANHandle : public ModuleHandle, public std::enable_shared_from_this<ANHandle> {
public:
    static std::shared_ptr<ANHandle> fock_a1(const ParamSpec& spec, const Scalar& v, bool checked);
    static std::shared_ptr<ANHandle> extend(ExtSide side, bool checkedFock, const Scalar& v,
                                            std::shared_ptr<const ANHandle> inner);
    static std::shared_ptr<ANHandle> twist(TwistKind kind, std::shared_ptr<const ANHandle> inner);

    int N() const { return N_; }
    // doubled-index parities of valid X^+ / X^- labels
    int xp_parity() const { return pp_; }
    int xm_parity() const { return pm_; }
    bool x_index_valid(AtomKind k, long di) const;

    // ModuleHandle interface
    std::string describe() const override;
    const ParamSpec& spec() const override { return spec_; }
    Vec apply_key(const std::vector<int>& leg, const Atom& a, long mode,
                  const BasisKey& key) const override;
    Scalar level(Family f) const override;
    Scalar level_at(const std::vector<int>& leg, Family f) const override;
    bool admissible() const override { return true; }
    bool atom_is_zero(const Atom& a) const override;
    std::vector<BasisKey> basis(int cutoff) const override;
    const ModuleHandle* leg_module(const std::vector<int>& leg) const override;

private:
    ANHandle() = default;

    enum class Kind { Base, Ext, Twist };
    Vec apply_x_ext(const Atom& a, long mode, const BasisKey& key) const;
    const Evaluator& inner_eval() const;

    Kind kind_ = Kind::Base;
    ParamSpec spec_{Scalar(2, 3), Scalar(3, 5)};
    int N_ = 1, pp_ = 1, pm_ = 0;

    // Base
    std::shared_ptr<const FockHandle> base_;
    // Ext
    ExtSide side_ = ExtSide::Left;
    bool fock_checked_ = false;
    std::shared_ptr<const FockHandle> fock_;
    std::shared_ptr<const ANHandle> inner_;
    std::shared_ptr<const TensorHandle> tens_;
    // Twist
    TwistKind tw_ = TwistKind::IndexShift;
    long dxp_ = 0, dxm_ = 0;          // doubled-index offsets of the pullback
    Scalar check_arg_ = Scalar(1);    // checked currents pull back to a(check_arg * z)
    bool swap_families_ = false;
    bool x_index_scale_ = false;      // X_i^±(z) -> X_i^±(q1^{±i} z)

    mutable std::shared_ptr<Evaluator> eval_;
    mutable std::mutex eval_mu_;
};

// C = q1^{N/2} * Č, exact; throws IncompatibleLevels on violation.
void verify_level_law(const ANHandle& m);

} // namespace toroidal
