#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <ostream>
#include <string>

namespace kl {

// Exact rational with an int64 fast path; falls back to GMP on overflow.
class Rat {
public:
    Rat() = default;
    Rat(int v) : n_(v) {}
    Rat(long v) : n_(v) {}
    Rat(long long v) : n_(v) {}
    Rat(long long num, long long den);
    explicit Rat(const mpq_class& q);
    explicit Rat(const mpz_class& z);

    static Rat parse(const std::string& s);

    bool is_zero() const { return !big_ && n_ == 0; }
    bool is_small() const { return !big_; }
    bool is_integer() const;
    int sign() const;

    mpq_class to_mpq() const;
    double to_double() const;
    std::string str() const;
    mpz_class num() const;
    mpz_class den() const;

    Rat operator-() const;
    Rat& operator+=(const Rat& o);
    Rat& operator-=(const Rat& o);
    Rat& operator*=(const Rat& o);
    Rat& operator/=(const Rat& o);

    friend Rat operator+(Rat a, const Rat& b) { return a += b; }
    friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
    friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
    friend Rat operator/(Rat a, const Rat& b) { return a /= b; }
    friend bool operator==(const Rat& a, const Rat& b);
    friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
    friend bool operator<(const Rat& a, const Rat& b);
    friend std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

private:
    void set_big(mpq_class q);
    void normalize_small(__int128 n, __int128 d);

    int64_t n_ = 0;
    int64_t d_ = 1;
    std::shared_ptr<const mpq_class> big_;
};

Rat abs(const Rat& r);
Rat pow(const Rat& r, int e);

}  // namespace kl
