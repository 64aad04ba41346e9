#pragma once

#include "toroidal/scalar.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace toroidal {

// Sparse Laurent polynomial in a fixed small number of variables.
// Exponents may be negative; arity is fixed per value.
class Poly {
public:
    using Exps = std::vector<int>;

    explicit Poly(int arity = 1) : arity_(arity) {}

    static Poly constant(int arity, const Scalar& c) {
        Poly p(arity);
        if (!c.is_zero()) p.terms_[Exps(arity, 0)] = c;
        return p;
    }
    // c * x_i^e
    static Poly monomial(int arity, int var, int e, const Scalar& c = Scalar(1)) {
        Poly p(arity);
        Exps ex(arity, 0);
        ex[var] = e;
        if (!c.is_zero()) p.terms_[ex] = c;
        return p;
    }

    int arity() const { return arity_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<Exps, Scalar>& terms() const { return terms_; }

    void add_term(const Exps& e, const Scalar& c) {
        if (c.is_zero()) return;
        auto [it, fresh] = terms_.emplace(e, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    Poly operator-() const {
        Poly r(arity_);
        for (auto& [e, c] : terms_) r.terms_[e] = -c;
        return r;
    }
    Poly& operator+=(const Poly& o) {
        check(o);
        for (auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        check(o);
        for (auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

    friend Poly operator*(const Poly& a, const Poly& b) {
        a.check(b);
        Poly r(a.arity_);
        for (auto& [ea, ca] : a.terms_)
            for (auto& [eb, cb] : b.terms_) {
                Exps e(a.arity_);
                for (int i = 0; i < a.arity_; ++i) e[i] = ea[i] + eb[i];
                r.add_term(e, ca * cb);
            }
        return r;
    }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }
    Poly& operator*=(const Scalar& c) {
        if (c.is_zero()) { terms_.clear(); return *this; }
        for (auto& [e, v] : terms_) v *= c;
        return *this;
    }
    friend Poly operator*(Poly a, const Scalar& c) { return a *= c; }

    friend bool operator==(const Poly& a, const Poly& b) { return a.arity_ == b.arity_ && a.terms_ == b.terms_; }

    // Substitute x_i -> c_i * x_i.
    Poly scale_vars(const std::vector<Scalar>& cs) const {
        Poly r(arity_);
        for (auto& [e, coef] : terms_) {
            Scalar c = coef;
            for (int i = 0; i < arity_; ++i)
                if (e[i] != 0) c *= cs[i].pow(e[i]);
            r.add_term(e, c);
        }
        return r;
    }

    Scalar eval(const std::vector<Scalar>& xs) const {
        Scalar acc(0);
        for (auto& [e, coef] : terms_) {
            Scalar t = coef;
            for (int i = 0; i < arity_; ++i)
                if (e[i] != 0) t *= xs[i].pow(e[i]);
            acc += t;
        }
        return acc;
    }

    bool homogeneous(int* degree_out = nullptr) const {
        bool first = true;
        int deg = 0;
        for (auto& [e, c] : terms_) {
            int d = 0;
            for (int x : e) d += x;
            if (first) { deg = d; first = false; }
            else if (d != deg) return false;
        }
        if (degree_out) *degree_out = deg;
        return true;
    }

    int min_exp(int var) const {
        if (terms_.empty()) throw std::logic_error("Poly::min_exp on zero polynomial");
        bool first = true;
        int m = 0;
        for (auto& [e, c] : terms_) {
            if (first || e[var] < m) m = e[var];
            first = false;
        }
        return m;
    }
    int max_exp(int var) const {
        if (terms_.empty()) throw std::logic_error("Poly::max_exp on zero polynomial");
        bool first = true;
        int m = 0;
        for (auto& [e, c] : terms_) {
            if (first || e[var] > m) m = e[var];
            first = false;
        }
        return m;
    }

    std::string str(const std::vector<std::string>& names) const {
        if (terms_.empty()) return "0";
        std::string out;
        for (auto& [e, c] : terms_) {
            if (!out.empty()) out += " + ";
            out += c.str();
            for (int i = 0; i < arity_; ++i)
                if (e[i] != 0) out += "*" + names[i] + "^" + std::to_string(e[i]);
        }
        return out;
    }

private:
    void check(const Poly& o) const {
        if (arity_ != o.arity_) throw std::logic_error("Poly: arity mismatch");
    }

    int arity_;
    std::map<Exps, Scalar> terms_;
};

// Bivariate helpers, variables (z, w).
inline Poly linear_zw(const Scalar& az, const Scalar& aw) {
    // az*z + aw*w
    Poly p(2);
    p.add_term({1, 0}, az);
    p.add_term({0, 1}, aw);
    return p;
}

// (z - c*w)
inline Poly z_minus(const Scalar& c) { return linear_zw(Scalar(1), -c); }
// (w - c*z)
inline Poly w_minus(const Scalar& c) { return linear_zw(-c, Scalar(1)); }

} // namespace toroidal
