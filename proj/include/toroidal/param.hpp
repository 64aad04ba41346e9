#pragma once

#include "toroidal/poly.hpp"
#include "toroidal/scalar.hpp"
#include "toroidal/series.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace toroidal {

// Which quantum toroidal gl(1) family a generator belongs to: the plain
// algebra (parameters q_i) or the checked one (parameters q̌_i with
// q̌₁ = q₁⁻¹, q̌₂ = q₂).
enum class Family { Plain, Checked };

inline Family other(Family f) { return f == Family::Plain ? Family::Checked : Family::Plain; }

// Structure-constant mutations for the failure-injection suite.
enum class Fault { None, C1PlusOne, Kappa1PlusOne, K1Shift };

struct GenericityViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact parameter field: s1, s2 generic rationals, everything else derived.
// Square roots are primitive: q_i = s_i^2, so half-integer powers of q never
// require root extraction.
class ParamSpec {
public:
    ParamSpec(const Scalar& s1, const Scalar& s2, long genericity_bound = 24,
              Fault fault = Fault::None);

    static ParamSpec from_seed(std::uint64_t seed, long genericity_bound = 24,
                               Fault fault = Fault::None);

    // s_i and q_i = s_i^2 of the requested family; i in {1,2,3}.
    Scalar s(int i, Family f = Family::Plain) const;
    Scalar q(int i, Family f = Family::Plain) const { return s(i, f) * s(i, f); }

    // kappa_r = (1-q1^r)(1-q2^r)(1-q3^r); honours the Kappa1PlusOne fault.
    Scalar kappa(long r, Family f = Family::Plain) const;
    // c_i = kappa_1 / (s_i - s_i^{-1}); honours the C1PlusOne fault.
    Scalar c(int i, Family f = Family::Plain) const;

    // q1^(d/2) for a doubled exponent d (exact via s1).
    Scalar q1_half_pow(long doubled, Family f = Family::Plain) const { return s(1, f).pow(doubled); }

    // Argument step of the fused chains inside k_r; q1 normally, perturbed
    // under the K1Shift fault.
    Scalar k_chain_step(Family f) const;

    long genericity_bound() const { return bound_; }
    Fault fault() const { return fault_; }

    // omega(x) = (1-q2 x)(1-q3 x) / ((1-x)(1-q2 q3 x)) of the family.
    RationalFunction1 omega(Family f = Family::Plain) const;
    // g(z,w) = (z-q1 w)(z-q2 w)(z-q3 w) of the family.
    Poly g_poly(Family f = Family::Plain) const;

    // The spec with the two parameter families exchanged (switch twist).
    ParamSpec swapped() const;

    std::string digest() const; // deterministic text key

    Scalar K_scalar = Scalar(1);
    Scalar Kcheck_scalar = Scalar(1);
    Scalar psi0_scalar = Scalar(1);

private:
    void genericity_check() const;

    Scalar s_[3];      // plain family
    Scalar scheck_[3]; // checked family
    long bound_;
    Fault fault_;
};

struct ScalarCheck {
    std::string name;
    bool pass;
    std::string detail; // exact discrepancy or recorded constant
};

// The closed-form scalar identity suite: omega identities, the omega+ - omega-
// delta identity, the Appendix-A f-sum, fusion well-definedness constants and
// the two-route kappa recomputation. Failures are report entries.
std::vector<ScalarCheck> check_scalar_identities(const ParamSpec& spec);

} // namespace toroidal
