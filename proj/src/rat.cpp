#include "killing_lab/rat.hpp"

#include <numeric>
#include <stdexcept>

namespace kl {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

constexpr __int128 kMax = INT64_MAX;
constexpr __int128 kMin = -static_cast<__int128>(INT64_MAX);

mpz_class mpz_from_i128(__int128 v) {
    bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
    mpz_class hi(static_cast<unsigned long>(static_cast<uint64_t>(u >> 64)));
    mpz_class lo(static_cast<unsigned long>(static_cast<uint64_t>(u)));
    mpz_class r = (hi << 64) + lo;
    return neg ? mpz_class(-r) : r;
}

}  // namespace

Rat::Rat(long long num, long long den) {
    if (den == 0) throw std::domain_error("Rat: zero denominator");
    normalize_small(num, den);
}

Rat::Rat(const mpq_class& q) {
    mpq_class c = q;
    c.canonicalize();
    set_big(std::move(c));
}

Rat::Rat(const mpz_class& z) { set_big(mpq_class(z)); }

Rat Rat::parse(const std::string& s) {
    mpq_class q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("Rat: cannot parse '" + s + "'");
    if (q.get_den() == 0) throw std::domain_error("Rat: zero denominator");
    q.canonicalize();
    return Rat(q);
}

void Rat::normalize_small(__int128 n, __int128 d) {
    if (d < 0) {
        n = -n;
        d = -d;
    }
    __int128 g = gcd128(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    if (n == 0) d = 1;
    if (n >= kMin && n <= kMax && d <= kMax) {
        n_ = static_cast<int64_t>(n);
        d_ = static_cast<int64_t>(d);
        big_.reset();
    } else {
        mpq_class q(mpz_from_i128(n), mpz_from_i128(d));
        big_ = std::make_shared<const mpq_class>(std::move(q));
    }
}

void Rat::set_big(mpq_class q) {
    if (q.get_num().fits_slong_p() && q.get_den().fits_slong_p()) {
        n_ = q.get_num().get_si();
        d_ = q.get_den().get_si();
        if (n_ != INT64_MIN) {
            big_.reset();
            return;
        }
    }
    big_ = std::make_shared<const mpq_class>(std::move(q));
}

bool Rat::is_integer() const { return big_ ? big_->get_den() == 1 : d_ == 1; }

int Rat::sign() const {
    if (big_) return sgn(*big_);
    return (n_ > 0) - (n_ < 0);
}

mpq_class Rat::to_mpq() const {
    if (big_) return *big_;
    return mpq_class(mpz_class(static_cast<long>(n_)), mpz_class(static_cast<long>(d_)));
}

double Rat::to_double() const {
    if (big_) return big_->get_d();
    return static_cast<double>(n_) / static_cast<double>(d_);
}

std::string Rat::str() const {
    if (big_) return big_->get_str();
    if (d_ == 1) return std::to_string(n_);
    return std::to_string(n_) + "/" + std::to_string(d_);
}

mpz_class Rat::num() const { return big_ ? mpz_class(big_->get_num()) : mpz_class(static_cast<long>(n_)); }
mpz_class Rat::den() const { return big_ ? mpz_class(big_->get_den()) : mpz_class(static_cast<long>(d_)); }

Rat Rat::operator-() const {
    Rat r = *this;
    if (big_) r.set_big(mpq_class(-*big_));
    else r.n_ = -n_;
    return r;
}

Rat& Rat::operator+=(const Rat& o) {
    if (!big_ && !o.big_) {
        if (d_ == 1 && o.d_ == 1) {
            int64_t s;
            if (!__builtin_add_overflow(n_, o.n_, &s) && s != INT64_MIN) {
                n_ = s;
                return *this;
            }
        }
        __int128 n = static_cast<__int128>(n_) * o.d_ + static_cast<__int128>(o.n_) * d_;
        __int128 d = static_cast<__int128>(d_) * o.d_;
        normalize_small(n, d);
        return *this;
    }
    set_big(to_mpq() + o.to_mpq());
    return *this;
}

Rat& Rat::operator-=(const Rat& o) { return *this += -o; }

Rat& Rat::operator*=(const Rat& o) {
    if (!big_ && !o.big_) {
        if (d_ == 1 && o.d_ == 1) {
            int64_t s;
            if (!__builtin_mul_overflow(n_, o.n_, &s) && s != INT64_MIN) {
                n_ = s;
                return *this;
            }
        }
        normalize_small(static_cast<__int128>(n_) * o.n_, static_cast<__int128>(d_) * o.d_);
        return *this;
    }
    set_big(to_mpq() * o.to_mpq());
    return *this;
}

Rat& Rat::operator/=(const Rat& o) {
    if (o.is_zero()) throw std::domain_error("Rat: division by zero");
    if (!big_ && !o.big_) {
        normalize_small(static_cast<__int128>(n_) * o.d_, static_cast<__int128>(d_) * o.n_);
        return *this;
    }
    set_big(to_mpq() / o.to_mpq());
    return *this;
}

bool operator==(const Rat& a, const Rat& b) {
    if (!a.big_ && !b.big_) return a.n_ == b.n_ && a.d_ == b.d_;
    return a.to_mpq() == b.to_mpq();
}

bool operator<(const Rat& a, const Rat& b) {
    if (!a.big_ && !b.big_)
        return static_cast<__int128>(a.n_) * b.d_ < static_cast<__int128>(b.n_) * a.d_;
    return a.to_mpq() < b.to_mpq();
}

Rat abs(const Rat& r) { return r.sign() < 0 ? -r : r; }

Rat pow(const Rat& r, int e) {
    if (e < 0) return Rat(1) / pow(r, -e);
    Rat out(1), b = r;
    while (e) {
        if (e & 1) out *= b;
        b *= b;
        e >>= 1;
    }
    return out;
}

}  // namespace kl
