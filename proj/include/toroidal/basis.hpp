#pragma once

#include "toroidal/scalar.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace toroidal {

// Basis labels for the explicit modules: a Fock partition monomial, a vector
// representation label |i>, or a tensor pair of labels.
class BasisKey {
public:
    enum class Kind { Partition, Label, Pair };

    static BasisKey partition(std::vector<int> parts) {
        std::sort(parts.begin(), parts.end(), std::greater<int>());
        BasisKey k;
        k.kind_ = Kind::Partition;
        k.parts_ = std::move(parts);
        return k;
    }
    static BasisKey vacuum() { return partition({}); }
    static BasisKey label(int i) {
        BasisKey k;
        k.kind_ = Kind::Label;
        k.label_ = i;
        return k;
    }
    static BasisKey pair(BasisKey a, BasisKey b) {
        BasisKey k;
        k.kind_ = Kind::Pair;
        k.a_ = std::make_shared<BasisKey>(std::move(a));
        k.b_ = std::make_shared<BasisKey>(std::move(b));
        return k;
    }

    Kind kind() const { return kind_; }
    const std::vector<int>& parts() const { return parts_; }
    int label_value() const { return label_; }
    const BasisKey& left() const { return *a_; }
    const BasisKey& right() const { return *b_; }

    // Homogeneous degree; vector-representation labels are not graded.
    long degree() const {
        switch (kind_) {
        case Kind::Partition:
            return -std::accumulate(parts_.begin(), parts_.end(), 0L);
        case Kind::Pair:
            return a_->degree() + b_->degree();
        case Kind::Label:
            throw std::logic_error("BasisKey::degree on a vector-representation label");
        }
        return 0;
    }

    friend bool operator<(const BasisKey& x, const BasisKey& y) {
        if (x.kind_ != y.kind_) return x.kind_ < y.kind_;
        switch (x.kind_) {
        case Kind::Partition: return x.parts_ < y.parts_;
        case Kind::Label: return x.label_ < y.label_;
        case Kind::Pair:
            if (*x.a_ < *y.a_) return true;
            if (*y.a_ < *x.a_) return false;
            return *x.b_ < *y.b_;
        }
        return false;
    }
    friend bool operator==(const BasisKey& x, const BasisKey& y) { return !(x < y) && !(y < x); }

    std::string str() const {
        switch (kind_) {
        case Kind::Partition: {
            if (parts_.empty()) return "vac";
            std::string s = "h[";
            for (std::size_t i = 0; i < parts_.size(); ++i)
                s += (i ? "," : "") + std::to_string(parts_[i]);
            return s + "]";
        }
        case Kind::Label: return "|" + std::to_string(label_) + ">";
        case Kind::Pair: return "(" + a_->str() + ")x(" + b_->str() + ")";
        }
        return "?";
    }

private:
    Kind kind_ = Kind::Partition;
    std::vector<int> parts_;
    int label_ = 0;
    std::shared_ptr<const BasisKey> a_, b_;
};

// Sparse module element.
class Vec {
public:
    Vec() = default;
    static Vec unit(BasisKey k) {
        Vec v;
        v.terms_[std::move(k)] = Scalar(1);
        return v;
    }

    bool is_zero() const { return terms_.empty(); }
    const std::map<BasisKey, Scalar>& terms() const { return terms_; }

    void add(const BasisKey& k, const Scalar& c) {
        if (c.is_zero()) return;
        auto [it, fresh] = terms_.emplace(k, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }
    Vec& operator+=(const Vec& o) {
        for (auto& [k, c] : o.terms_) add(k, c);
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (auto& [k, c] : o.terms_) add(k, -c);
        return *this;
    }
    Vec& operator*=(const Scalar& c) {
        if (c.is_zero()) { terms_.clear(); return *this; }
        for (auto& [k, v] : terms_) v *= c;
        return *this;
    }
    friend Vec operator*(Vec v, const Scalar& c) { return v *= c; }
    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend bool operator==(const Vec& a, const Vec& b) { return a.terms_ == b.terms_; }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::string s;
        for (auto& [k, c] : terms_) {
            if (!s.empty()) s += " + ";
            s += c.str() + "*" + k.str();
        }
        return s;
    }

private:
    std::map<BasisKey, Scalar> terms_;
};

// All partitions of n (parts descending).
std::vector<std::vector<int>> partitions_of(int n);

} // namespace toroidal
