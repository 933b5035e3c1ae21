#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fgl {

/// Exact rational number. Always canonical: lowest terms, denominator > 0,
/// zero is 0/1. Arithmetic is arbitrary precision (GMP underneath).
class Rational {
public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {}
    Rational(long n, long d) {
        if (d == 0) throw std::domain_error("Rational: zero denominator");
        v_ = mpq_class(n, d);
        v_.canonicalize();
    }
    explicit Rational(const mpz_class& n) : v_(n) {}
    explicit Rational(const mpq_class& q) : v_(q) { v_.canonicalize(); }

    static Rational from_string(const std::string& num, const std::string& den = "1") {
        mpq_class q{mpz_class(num), mpz_class(den)};
        if (q.get_den() == 0) throw std::domain_error("Rational: zero denominator");
        q.canonicalize();
        return Rational(q);
    }

    bool is_zero() const { return sgn(v_) == 0; }
    bool is_one() const { return v_ == 1; }
    bool is_integer() const { return v_.get_den() == 1; }
    int sign() const { return sgn(v_); }

    Rational operator-() const { return Rational(mpq_class(-v_)); }
    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw std::domain_error("Rational: division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { a += b; return a; }
    friend Rational operator-(Rational a, const Rational& b) { a -= b; return a; }
    friend Rational operator*(Rational a, const Rational& b) { a *= b; return a; }
    friend Rational operator/(Rational a, const Rational& b) { a /= b; return a; }
    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }

    Rational inverse() const {
        if (is_zero()) throw std::domain_error("Rational: inverse of zero");
        return Rational(mpq_class(1) / v_);
    }
    Rational times_int(long k) const { return Rational(mpq_class(v_ * k)); }
    Rational divided_by_int(long k) const {
        if (k == 0) throw std::domain_error("Rational: division by zero");
        mpq_class q = v_ / mpq_class(k);
        q.canonicalize();
        return Rational(q);
    }
    Rational pow_ui(unsigned long e) const {
        mpz_class n, d;
        mpz_pow_ui(n.get_mpz_t(), v_.get_num().get_mpz_t(), e);
        mpz_pow_ui(d.get_mpz_t(), v_.get_den().get_mpz_t(), e);
        return Rational(mpq_class(n, d));
    }

    /// Exemplar-based factories; they let generic series code build constants
    /// in the same coefficient ring as an existing value.
    static Rational zero_like(const Rational&) { return Rational(); }
    static Rational one_like(const Rational&) { return Rational(1); }
    static Rational int_like(const Rational&, long k) { return Rational(k); }

    const mpz_class& num() const { return v_.get_num(); }
    const mpz_class& den() const { return v_.get_den(); }
    std::string num_string() const { return v_.get_num().get_str(); }
    std::string den_string() const { return v_.get_den().get_str(); }
    std::string str() const {
        return is_integer() ? num_string() : num_string() + "/" + den_string();
    }
    double to_double() const { return v_.get_d(); }

private:
    mpq_class v_;
};

}  // namespace fgl
