#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace fgl {

/// Description of a small finite field F_p or F_{p^2}. Contexts are interned,
/// so elements can hold a plain pointer and copies stay cheap.
///
/// For degree 2 the field is F_p[w]/(w^2 - s1*w - s0); odd p uses w^2 = r with
/// r the smallest quadratic non-residue, p = 2 uses w^2 = w + 1.
struct GFContext {
    std::uint32_t p = 0;
    int deg = 1;
    std::uint32_t s0 = 0;  // w^2 = s1*w + s0
    std::uint32_t s1 = 0;

    std::uint64_t size() const { return deg == 1 ? p : std::uint64_t(p) * p; }

    static const GFContext* get(std::uint32_t p, int deg);
};

namespace detail {

inline bool is_prime_u32(std::uint32_t n) {
    if (n < 2) return false;
    for (std::uint32_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline std::uint32_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint32_t p) {
    std::uint64_t r = 1 % p;
    b %= p;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return std::uint32_t(r);
}

}  // namespace detail

inline const GFContext* GFContext::get(std::uint32_t p, int deg) {
    if (!detail::is_prime_u32(p)) throw std::domain_error("GF: modulus must be prime");
    if (deg != 1 && deg != 2) throw std::domain_error("GF: only degree 1 or 2 supported");
    static std::map<std::pair<std::uint32_t, int>, GFContext> registry;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(p, deg);
    auto it = registry.find(key);
    if (it != registry.end()) return &it->second;
    GFContext ctx;
    ctx.p = p;
    ctx.deg = deg;
    if (deg == 2) {
        if (p == 2) {
            ctx.s0 = 1;  // w^2 = w + 1
            ctx.s1 = 1;
        } else {
            std::uint32_t r = 2;
            while (detail::pow_mod(r, (p - 1) / 2, p) != p - 1) ++r;
            ctx.s0 = r;  // w^2 = r
            ctx.s1 = 0;
        }
    }
    return &registry.emplace(key, ctx).first->second;
}

/// Element of F_p or F_{p^2}: a + b*w, reduced mod p.
class GFElem {
public:
    GFElem() : a_(0), b_(0), ctx_(nullptr) {}
    GFElem(const GFContext* ctx, long a, long b = 0) : ctx_(ctx) {
        a_ = reduce(a);
        b_ = reduce(b);
        if (b_ != 0 && ctx_->deg == 1)
            throw std::domain_error("GF: extension coordinate in a prime field");
    }

    const GFContext* context() const { return ctx_; }
    std::uint32_t c0() const { return a_; }
    std::uint32_t c1() const { return b_; }

    bool is_zero() const { return a_ == 0 && b_ == 0; }
    bool is_one() const { return a_ == 1 && b_ == 0; }

    friend bool operator==(const GFElem& x, const GFElem& y) {
        return x.a_ == y.a_ && x.b_ == y.b_ && (x.is_zero() || y.is_zero() || x.ctx_ == y.ctx_);
    }
    friend bool operator!=(const GFElem& x, const GFElem& y) { return !(x == y); }

    GFElem operator-() const {
        if (!ctx_) return *this;
        return make(ctx_, (ctx_->p - a_) % ctx_->p, (ctx_->p - b_) % ctx_->p);
    }
    GFElem& operator+=(const GFElem& o) {
        const GFContext* c = merge(o);
        if (!c) return *this;
        a_ = (a_ + o.a_) % c->p;
        b_ = (b_ + o.b_) % c->p;
        ctx_ = c;
        return *this;
    }
    GFElem& operator-=(const GFElem& o) { return *this += -o; }
    GFElem& operator*=(const GFElem& o) {
        const GFContext* c = merge(o);
        if (!c) { a_ = b_ = 0; ctx_ = c ? c : ctx_; return *this; }
        std::uint64_t p = c->p;
        std::uint64_t ac = std::uint64_t(a_) * o.a_ % p;
        std::uint64_t bd = std::uint64_t(b_) * o.b_ % p;
        std::uint64_t ad_bc = (std::uint64_t(a_) * o.b_ + std::uint64_t(b_) * o.a_) % p;
        a_ = std::uint32_t((ac + bd * c->s0) % p);
        b_ = std::uint32_t((ad_bc + bd * c->s1) % p);
        ctx_ = c;
        return *this;
    }
    friend GFElem operator+(GFElem x, const GFElem& y) { x += y; return x; }
    friend GFElem operator-(GFElem x, const GFElem& y) { x -= y; return x; }
    friend GFElem operator*(GFElem x, const GFElem& y) { x *= y; return x; }

    GFElem pow(std::uint64_t e) const {
        GFElem r = one_like(*this), b = *this;
        while (e) {
            if (e & 1) r *= b;
            b *= b;
            e >>= 1;
        }
        return r;
    }
    GFElem inverse() const {
        if (is_zero() || !ctx_) throw std::domain_error("GF: inverse of zero");
        return pow(ctx_->size() - 2);
    }
    GFElem times_int(long k) const {
        if (!ctx_) return *this;
        return *this * make(ctx_, reduce_static(k, ctx_->p), 0);
    }
    GFElem divided_by_int(long k) const {
        if (!ctx_) throw std::domain_error("GF: division in a zero ring");
        std::uint32_t kk = reduce_static(k, ctx_->p);
        if (kk == 0) throw std::domain_error("GF: dividing by an integer multiple of the characteristic");
        return *this * make(ctx_, kk, 0).inverse();
    }

    static GFElem zero_like(const GFElem& e) { return e.ctx_ ? make(e.ctx_, 0, 0) : GFElem(); }
    static GFElem one_like(const GFElem& e) {
        if (!e.ctx_) throw std::domain_error("GF: one_like of context-free zero");
        return make(e.ctx_, 1, 0);
    }
    static GFElem int_like(const GFElem& e, long k) {
        if (!e.ctx_) throw std::domain_error("GF: int_like of context-free zero");
        return make(e.ctx_, reduce_static(k, e.ctx_->p), 0);
    }

    std::string str() const {
        if (b_ == 0) return std::to_string(a_);
        return std::to_string(a_) + "+" + std::to_string(b_) + "w";
    }

private:
    static GFElem make(const GFContext* ctx, std::uint32_t a, std::uint32_t b) {
        GFElem e;
        e.ctx_ = ctx;
        e.a_ = a;
        e.b_ = b;
        return e;
    }
    static std::uint32_t reduce_static(long v, std::uint32_t p) {
        long m = v % long(p);
        if (m < 0) m += p;
        return std::uint32_t(m);
    }
    std::uint32_t reduce(long v) const { return reduce_static(v, ctx_->p); }
    // Context-free zeros (default-constructed) absorb into the other operand's field.
    const GFContext* merge(const GFElem& o) {
        if (ctx_ && o.ctx_ && ctx_ != o.ctx_)
            throw std::invalid_argument("GF: mixing elements of different fields");
        return ctx_ ? ctx_ : o.ctx_;
    }

    std::uint32_t a_, b_;
    const GFContext* ctx_;
};

}  // namespace fgl
