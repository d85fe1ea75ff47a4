#pragma once

#include <algorithm>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "lru/base.hpp"
#include "lru/numutil.hpp"
#include "lru/ringspec.hpp"
#include "lru/rng.hpp"

namespace lru {

class Ring;
using RingPtr = std::shared_ptr<const Ring>;

// Rational-kind element: exact coordinates in the flattened monomial basis.
using QVec = std::vector<mpq_class>;

class Ring : public std::enable_shared_from_this<Ring> {
public:
    enum class Kind { Finite, Rational };

    explicit Ring(Kind kind, RingSpecPtr spec) : kind_(kind), spec_(std::move(spec)) {}
    virtual ~Ring() = default;
    Ring(const Ring&) = delete;
    Ring& operator=(const Ring&) = delete;

    Kind kind() const { return kind_; }
    bool finite() const { return kind_ == Kind::Finite; }
    const RingSpecPtr& spec() const { return spec_; }
    std::string name() const { return spec_ ? spec_->print() : "<anonymous>"; }

private:
    Kind kind_;
    RingSpecPtr spec_;
};

// ---------------------------------------------------------------------------
// Finite carriers. Elements are canonical indices 0..order-1; all arithmetic
// returns canonical indices. Structural arithmetic is the default; op tables
// are materialized lazily for exhaustive work on small carriers.
// ---------------------------------------------------------------------------

class FiniteRing : public Ring {
public:
    FiniteRing(RingSpecPtr spec, u64 order) : Ring(Kind::Finite, std::move(spec)), order_(order) {}

    u64 order() const { return order_; }
    u64 zero() const { return zero_; }
    u64 one() const { return one_; }

    u64 add(u64 a, u64 b) const {
        if (!add_tab_.empty()) return add_tab_[a * order_ + b];
        return add_impl(a, b);
    }
    u64 mul(u64 a, u64 b) const {
        if (!mul_tab_.empty()) return mul_tab_[a * order_ + b];
        return mul_impl(a, b);
    }
    u64 neg(u64 a) const { return neg_impl(a); }
    u64 sub(u64 a, u64 b) const { return add(a, neg(b)); }

    u64 pow(u64 a, u64 e) const {
        u64 r = one_, b = a;
        while (e) {
            if (e & 1) r = mul(r, b);
            b = mul(b, b);
            e >>= 1;
        }
        return r;
    }

    // c * 1 with c an arbitrary integer.
    u64 from_int(const mpz_class& c) const { return from_int_impl(c); }
    u64 from_int(long c) const { return from_int_impl(mpz_class(c)); }

    // Tower generators visible as coefficient literals (bottom-up), empty for
    // structureless carriers.
    virtual std::vector<u64> scope_generators() const { return {}; }

    virtual std::string print_element(u64 a) const = 0;

    // Materializes op tables when the carrier is small enough; exhaustive
    // operations call this before tight loops.
    void ensure_tables(u64 bound = default_config().table_cache_bound) const {
        if (order_ > bound) return;
        std::lock_guard<std::mutex> lock(cache_mu_);
        if (!add_tab_.empty()) return;
        std::vector<u64> at(order_ * order_), mt(order_ * order_);
        for (u64 a = 0; a < order_; ++a)
            for (u64 b = 0; b < order_; ++b) {
                at[a * order_ + b] = add_impl(a, b);
                mt[a * order_ + b] = mul_impl(a, b);
            }
        add_tab_ = std::move(at);
        mul_tab_ = std::move(mt);
    }

    // Additive order of 1 (the characteristic).
    u64 characteristic() const {
        u64 c = 1, x = one_;
        while (x != zero_) {
            x = add(x, one_);
            ++c;
            if (c > order_) throw InternalCheckError("additive order of 1 exceeds ring order");
        }
        return c;
    }

    // Unit cache slots filled by local analysis (see local.hpp).
    mutable std::mutex cache_mu_;
    mutable std::vector<u64> units_cache_;
    mutable bool units_cached_ = false;

protected:
    virtual u64 add_impl(u64, u64) const = 0;
    virtual u64 mul_impl(u64, u64) const = 0;
    virtual u64 neg_impl(u64) const = 0;
    virtual u64 from_int_impl(const mpz_class& c) const = 0;

    u64 order_;
    u64 zero_ = 0;
    u64 one_ = 0;

private:
    mutable std::vector<u64> add_tab_, mul_tab_;
};

using FiniteRingPtr = std::shared_ptr<const FiniteRing>;

inline FiniteRingPtr as_finite(const RingPtr& r) {
    auto f = std::dynamic_pointer_cast<const FiniteRing>(r);
    if (!f) throw Error("operation requires a finite ring carrier");
    return f;
}

class ZmodRing final : public FiniteRing {
public:
    ZmodRing(RingSpecPtr spec, u64 n) : FiniteRing(std::move(spec), n) {
        if (n < 2) throw Error("Z/n requires n >= 2");
        one_ = 1;
    }

    u64 modulus() const { return order_; }
    std::string print_element(u64 a) const override { return std::to_string(a); }

protected:
    u64 add_impl(u64 a, u64 b) const override { return (a + b) % order_; }
    u64 mul_impl(u64 a, u64 b) const override { return (a * b) % order_; }
    u64 neg_impl(u64 a) const override { return a == 0 ? 0 : order_ - a; }
    u64 from_int_impl(const mpz_class& c) const override {
        mpz_class r;
        mpz_fdiv_r(r.get_mpz_t(), c.get_mpz_t(), mpz_class(order_).get_mpz_t());
        return r.get_ui();
    }
};

// base[x]/(f) with f monic of degree d; elements are little-endian digit
// vectors over the base carrier, index = sum digit_i * |base|^i. The constant
// embedding base -> this ring is the identity on indices.
class PolyQuotRing final : public FiniteRing {
public:
    PolyQuotRing(RingSpecPtr spec, FiniteRingPtr base, std::string var,
                 std::vector<u64> monic_tail, u64 order)
        : FiniteRing(std::move(spec), order),
          base_(std::move(base)),
          var_(std::move(var)),
          mod_tail_(std::move(monic_tail)) {
        deg_ = static_cast<unsigned>(mod_tail_.size());
        if (deg_ == 0) throw Error("polynomial quotient needs degree >= 1");
        neg_tail_.resize(deg_);
        for (unsigned i = 0; i < deg_; ++i) neg_tail_[i] = base_->neg(mod_tail_[i]);
        one_ = base_->one();
    }

    const FiniteRingPtr& base() const { return base_; }
    unsigned degree() const { return deg_; }
    const std::string& var() const { return var_; }
    // The class of x.
    u64 gen() const { return deg_ >= 2 ? base_->order() : neg_tail_[0]; }
    const std::vector<u64>& modulus_tail() const { return mod_tail_; }

    std::vector<u64> digits(u64 a) const {
        std::vector<u64> d(deg_);
        u64 m = base_->order();
        for (unsigned i = 0; i < deg_; ++i) {
            d[i] = a % m;
            a /= m;
        }
        return d;
    }

    u64 from_digits(const std::vector<u64>& d) const {
        u64 m = base_->order(), a = 0;
        for (unsigned i = deg_; i-- > 0;) a = a * m + d[i];
        return a;
    }

    std::vector<u64> scope_generators() const override {
        // Base scope generators embed with unchanged indices.
        auto gens = base_->scope_generators();
        gens.push_back(gen());
        return gens;
    }

    std::string print_element(u64 a) const override {
        auto d = digits(a);
        std::string out;
        for (unsigned i = 0; i < deg_; ++i) {
            if (d[i] == base_->zero()) continue;
            std::string coeff = base_->print_element(d[i]);
            std::string term;
            if (i == 0) {
                term = coeff;
            } else {
                std::string power = (i == 1) ? var_ : var_ + "^" + std::to_string(i);
                if (d[i] == base_->one())
                    term = power;
                else if (coeff.find('+') != std::string::npos ||
                         coeff.find('-') != std::string::npos)
                    term = "(" + coeff + ")*" + power;
                else
                    term = coeff + "*" + power;
            }
            if (!out.empty()) out += "+";
            out += term;
        }
        return out.empty() ? "0" : out;
    }

protected:
    u64 add_impl(u64 a, u64 b) const override {
        u64 m = base_->order(), r = 0, mult = 1;
        for (unsigned i = 0; i < deg_; ++i) {
            r += base_->add(a % m, b % m) * mult;
            a /= m;
            b /= m;
            mult *= m;
        }
        return r;
    }

    u64 mul_impl(u64 a, u64 b) const override {
        auto da = digits(a), db = digits(b);
        std::vector<u64> c(2 * deg_ - 1, base_->zero());
        for (unsigned i = 0; i < deg_; ++i) {
            if (da[i] == base_->zero()) continue;
            for (unsigned j = 0; j < deg_; ++j) {
                if (db[j] == base_->zero()) continue;
                c[i + j] = base_->add(c[i + j], base_->mul(da[i], db[j]));
            }
        }
        for (unsigned k = 2 * deg_ - 2; k >= deg_ && k < c.size(); --k) {
            u64 t = c[k];
            if (t == base_->zero()) continue;
            for (unsigned i = 0; i < deg_; ++i)
                c[k - deg_ + i] = base_->add(c[k - deg_ + i], base_->mul(t, neg_tail_[i]));
            c[k] = base_->zero();
        }
        c.resize(deg_);
        return from_digits(c);
    }

    u64 neg_impl(u64 a) const override {
        auto d = digits(a);
        for (auto& x : d) x = base_->neg(x);
        return from_digits(d);
    }

    u64 from_int_impl(const mpz_class& c) const override { return base_->from_int(c); }

private:
    FiniteRingPtr base_;
    std::string var_;
    std::vector<u64> mod_tail_; // f = x^deg + sum mod_tail_[i] x^i
    std::vector<u64> neg_tail_;
    unsigned deg_;
};

class ProductRing final : public FiniteRing {
public:
    ProductRing(RingSpecPtr spec, FiniteRingPtr a, FiniteRingPtr b)
        : FiniteRing(std::move(spec), a->order() * b->order()), a_(std::move(a)), b_(std::move(b)) {
        one_ = encode(a_->one(), b_->one());
        zero_ = encode(a_->zero(), b_->zero());
    }

    const FiniteRingPtr& first() const { return a_; }
    const FiniteRingPtr& second() const { return b_; }

    u64 encode(u64 x, u64 y) const { return x + a_->order() * y; }
    std::pair<u64, u64> decode(u64 v) const { return {v % a_->order(), v / a_->order()}; }

    std::string print_element(u64 v) const override {
        auto [x, y] = decode(v);
        return "(" + a_->print_element(x) + "," + b_->print_element(y) + ")";
    }

protected:
    u64 add_impl(u64 u, u64 v) const override {
        auto [ux, uy] = decode(u);
        auto [vx, vy] = decode(v);
        return encode(a_->add(ux, vx), b_->add(uy, vy));
    }
    u64 mul_impl(u64 u, u64 v) const override {
        auto [ux, uy] = decode(u);
        auto [vx, vy] = decode(v);
        return encode(a_->mul(ux, vx), b_->mul(uy, vy));
    }
    u64 neg_impl(u64 u) const override {
        auto [ux, uy] = decode(u);
        return encode(a_->neg(ux), b_->neg(uy));
    }
    u64 from_int_impl(const mpz_class& c) const override {
        return encode(a_->from_int(c), b_->from_int(c));
    }

private:
    FiniteRingPtr a_, b_;
};

class TableRing final : public FiniteRing {
public:
    TableRing(RingSpecPtr spec, u64 order, std::vector<u64> add_t, std::vector<u64> mul_t)
        : FiniteRing(std::move(spec), order), add_t_(std::move(add_t)), mul_t_(std::move(mul_t)) {
        if (add_t_.size() != order * order || mul_t_.size() != order * order)
            throw Error("table ring: table size mismatch");
        for (u64 v : add_t_)
            if (v >= order) throw Error("table ring: entry out of range");
        for (u64 v : mul_t_)
            if (v >= order) throw Error("table ring: entry out of range");
        zero_ = find_identity(add_t_);
        one_ = order == 1 ? 0 : find_identity(mul_t_);
    }

    static std::shared_ptr<TableRing> materialize(const FiniteRing& r) {
        u64 n = r.order();
        std::vector<u64> at(n * n), mt(n * n);
        for (u64 a = 0; a < n; ++a)
            for (u64 b = 0; b < n; ++b) {
                at[a * n + b] = r.add(a, b);
                mt[a * n + b] = r.mul(a, b);
            }
        auto spec = std::make_shared<RingSpec>();
        spec->node = RingSpec::Node::Table;
        spec->table_order = n;
        spec->add_table = at;
        spec->mul_table = mt;
        return std::make_shared<TableRing>(spec, n, std::move(at), std::move(mt));
    }

    std::string print_element(u64 a) const override { return std::to_string(a); }

protected:
    u64 add_impl(u64 a, u64 b) const override { return add_t_[a * order_ + b]; }
    u64 mul_impl(u64 a, u64 b) const override { return mul_t_[a * order_ + b]; }
    u64 neg_impl(u64 a) const override {
        for (u64 b = 0; b < order_; ++b)
            if (add_t_[a * order_ + b] == zero_) return b;
        throw Error("table ring: no additive inverse for element " + std::to_string(a));
    }
    u64 from_int_impl(const mpz_class& c) const override {
        u64 ch = characteristic();
        mpz_class r;
        mpz_fdiv_r(r.get_mpz_t(), c.get_mpz_t(), mpz_class(ch).get_mpz_t());
        u64 k = r.get_ui(), acc = zero_;
        for (u64 i = 0; i < k; ++i) acc = add(acc, one_);
        return acc;
    }

private:
    u64 find_identity(const std::vector<u64>& t) const {
        for (u64 e = 0; e < order_; ++e) {
            bool ok = true;
            for (u64 x = 0; x < order_ && ok; ++x)
                ok = t[e * order_ + x] == x && t[x * order_ + e] == x;
            if (ok) return e;
        }
        throw Error("table ring: no two-sided identity found");
    }

    std::vector<u64> add_t_, mul_t_;
};

// Quotient carrier: element i is the i-th smallest canonical coset
// representative (least base index in each coset).
class QuotRing final : public FiniteRing {
public:
    QuotRing(RingSpecPtr spec, FiniteRingPtr base, std::vector<u64> reps, std::vector<u64> canon)
        : FiniteRing(std::move(spec), reps.size()),
          base_(std::move(base)),
          reps_(std::move(reps)),
          canon_(std::move(canon)) {
        zero_ = index_of(canon_[base_->zero()]);
        one_ = index_of(canon_[base_->one()]);
    }

    const FiniteRingPtr& base() const { return base_; }
    u64 rep(u64 i) const { return reps_[i]; }
    u64 project(u64 base_elem) const { return index_of(canon_[base_elem]); }

    std::string print_element(u64 a) const override { return base_->print_element(reps_[a]); }

protected:
    u64 add_impl(u64 a, u64 b) const override {
        return index_of(canon_[base_->add(reps_[a], reps_[b])]);
    }
    u64 mul_impl(u64 a, u64 b) const override {
        return index_of(canon_[base_->mul(reps_[a], reps_[b])]);
    }
    u64 neg_impl(u64 a) const override { return index_of(canon_[base_->neg(reps_[a])]); }
    u64 from_int_impl(const mpz_class& c) const override {
        return index_of(canon_[base_->from_int(c)]);
    }

private:
    u64 index_of(u64 rep) const {
        auto it = std::lower_bound(reps_.begin(), reps_.end(), rep);
        if (it == reps_.end() || *it != rep)
            throw InternalCheckError("quotient: representative not canonical");
        return static_cast<u64>(it - reps_.begin());
    }

    FiniteRingPtr base_;
    std::vector<u64> reps_;  // quotient index -> canonical base representative
    std::vector<u64> canon_; // base index -> canonical representative of its coset
};

// Fiber product carrier: pairs (a, b) with f(a) = g(b), ordered by the
// product encoding a + |A| * b.
class PullbackRing final : public FiniteRing {
public:
    PullbackRing(RingSpecPtr spec, FiniteRingPtr a, FiniteRingPtr b, std::vector<u64> members)
        : FiniteRing(std::move(spec), members.size()),
          a_(std::move(a)),
          b_(std::move(b)),
          members_(std::move(members)) {
        zero_ = index_of(pair_code(a_->zero(), b_->zero()));
        one_ = index_of(pair_code(a_->one(), b_->one()));
    }

    const FiniteRingPtr& first() const { return a_; }
    const FiniteRingPtr& second() const { return b_; }

    std::pair<u64, u64> decode(u64 i) const {
        u64 c = members_[i];
        return {c % a_->order(), c / a_->order()};
    }

    std::string print_element(u64 i) const override {
        auto [x, y] = decode(i);
        return "(" + a_->print_element(x) + "," + b_->print_element(y) + ")";
    }

protected:
    u64 add_impl(u64 u, u64 v) const override {
        auto [ux, uy] = decode(u);
        auto [vx, vy] = decode(v);
        return index_of(pair_code(a_->add(ux, vx), b_->add(uy, vy)));
    }
    u64 mul_impl(u64 u, u64 v) const override {
        auto [ux, uy] = decode(u);
        auto [vx, vy] = decode(v);
        return index_of(pair_code(a_->mul(ux, vx), b_->mul(uy, vy)));
    }
    u64 neg_impl(u64 u) const override {
        auto [ux, uy] = decode(u);
        return index_of(pair_code(a_->neg(ux), b_->neg(uy)));
    }
    u64 from_int_impl(const mpz_class& c) const override {
        return index_of(pair_code(a_->from_int(c), b_->from_int(c)));
    }

private:
    u64 pair_code(u64 x, u64 y) const { return x + a_->order() * y; }

    u64 index_of(u64 code) const {
        auto it = std::lower_bound(members_.begin(), members_.end(), code);
        if (it == members_.end() || *it != code)
            throw InternalCheckError("fiber product: operation left the compatible set");
        return static_cast<u64>(it - members_.begin());
    }

    FiniteRingPtr a_, b_;
    std::vector<u64> members_; // sorted pair codes
};

// ---------------------------------------------------------------------------
// Rational-kind carrier: a finite-dimensional Q-algebra presented as a tower
// of monic polynomial quotients over Q. Elements are exact coordinate vectors
// in the flattened monomial basis (little-endian by tower level).
// ---------------------------------------------------------------------------

class RationalRing final : public Ring {
public:
    struct Level {
        std::string var;
        unsigned deg;
        std::vector<QVec> reduction; // x^deg = sum reduction[i] * x^i, entries in the sub-tower
    };

    explicit RationalRing(RingSpecPtr spec, std::vector<Level> levels = {})
        : Ring(Kind::Rational, std::move(spec)), levels_(std::move(levels)) {
        dim_ = 1;
        strides_.clear();
        for (const auto& lv : levels_) {
            strides_.push_back(dim_);
            dim_ *= lv.deg;
        }
    }

    u64 dimension() const { return dim_; }
    const std::vector<Level>& levels() const { return levels_; }

    QVec zero() const { return QVec(dim_, 0); }
    QVec one() const {
        QVec v(dim_, 0);
        v[0] = 1;
        return v;
    }
    QVec from_mpq(const mpq_class& c) const {
        QVec v(dim_, 0);
        v[0] = c;
        return v;
    }

    QVec basis_elem(u64 i) const {
        QVec v(dim_, 0);
        v[i] = 1;
        return v;
    }

    QVec var_elem(std::size_t level) const { return basis_elem(strides_[level]); }

    std::vector<QVec> scope_generators() const {
        std::vector<QVec> g;
        for (std::size_t i = 0; i < levels_.size(); ++i) g.push_back(var_elem(i));
        return g;
    }

    static bool is_zero(const QVec& v) {
        for (const auto& c : v)
            if (c != 0) return false;
        return true;
    }

    QVec add(const QVec& a, const QVec& b) const {
        QVec r(dim_);
        for (u64 i = 0; i < dim_; ++i) r[i] = a[i] + b[i];
        return r;
    }
    QVec sub(const QVec& a, const QVec& b) const {
        QVec r(dim_);
        for (u64 i = 0; i < dim_; ++i) r[i] = a[i] - b[i];
        return r;
    }
    QVec neg(const QVec& a) const {
        QVec r(dim_);
        for (u64 i = 0; i < dim_; ++i) r[i] = -a[i];
        return r;
    }
    QVec scale(const mpq_class& c, const QVec& a) const {
        QVec r(dim_);
        for (u64 i = 0; i < dim_; ++i) r[i] = c * a[i];
        return r;
    }

    QVec mul(const QVec& a, const QVec& b) const { return mul_level(levels_.size(), a, b); }

    QVec pow(const QVec& a, u64 e) const {
        QVec r = one(), b = a;
        while (e) {
            if (e & 1) r = mul(r, b);
            b = mul(b, b);
            e >>= 1;
        }
        return r;
    }

    // Solves u * y = 1; empty optional when u is not a unit.
    std::optional<QVec> inverse(const QVec& u) const {
        // Columns of the multiplication-by-u map, augmented with e_0.
        std::vector<QVec> m(dim_, QVec(dim_ + 1, 0));
        for (u64 j = 0; j < dim_; ++j) {
            QVec col = mul(u, basis_elem(j));
            for (u64 i = 0; i < dim_; ++i) m[i][j] = col[i];
        }
        m[0][dim_] = 1;
        // Exact Gaussian elimination.
        u64 row = 0;
        std::vector<u64> pivot_col(dim_, dim_);
        for (u64 col = 0; col < dim_ && row < dim_; ++col) {
            u64 p = row;
            while (p < dim_ && m[p][col] == 0) ++p;
            if (p == dim_) continue;
            std::swap(m[p], m[row]);
            mpq_class inv = 1 / m[row][col];
            for (u64 j = col; j <= dim_; ++j) m[row][j] *= inv;
            for (u64 i = 0; i < dim_; ++i) {
                if (i == row || m[i][col] == 0) continue;
                mpq_class f = m[i][col];
                for (u64 j = col; j <= dim_; ++j) m[i][j] -= f * m[row][j];
            }
            pivot_col[row] = col;
            ++row;
        }
        // u is a unit iff multiplication by u is bijective.
        if (row < dim_) return std::nullopt;
        QVec y(dim_, 0);
        for (u64 i = 0; i < dim_; ++i) y[pivot_col[i]] = m[i][dim_];
        return y;
    }

    bool is_nilpotent(const QVec& v) const {
        QVec p = v;
        for (u64 i = 0; i <= dim_; ++i) {
            if (is_zero(p)) return true;
            p = mul(p, v);
        }
        return false;
    }

    std::vector<std::pair<std::string, unsigned>> monomial(u64 index) const {
        std::vector<std::pair<std::string, unsigned>> m;
        for (std::size_t l = 0; l < levels_.size(); ++l) {
            unsigned e = static_cast<unsigned>(index / strides_[l] % levels_[l].deg);
            if (e) m.emplace_back(levels_[l].var, e);
        }
        return m;
    }

    std::string print_element(const QVec& v) const {
        std::string out;
        for (u64 i = 0; i < dim_; ++i) {
            if (v[i] == 0) continue;
            mpq_class a = abs(v[i]);
            bool neg_term = v[i] < 0;
            std::string term;
            auto mono = monomial(i);
            std::vector<std::string> pieces;
            for (auto& [var, e] : mono)
                pieces.push_back(e == 1 ? var : var + "^" + std::to_string(e));
            if (mono.empty() || a != 1) pieces.insert(pieces.begin(), mpq_str(a));
            for (std::size_t k = 0; k < pieces.size(); ++k) {
                if (k) term += "*";
                term += pieces[k];
            }
            if (out.empty())
                out = (neg_term ? "-" : "") + term;
            else
                out += (neg_term ? "-" : "+") + term;
        }
        return out.empty() ? "0" : out;
    }

private:
    QVec mul_level(std::size_t level, const QVec& a, const QVec& b) const {
        if (level == 0) {
            QVec r(1);
            r[0] = a[0] * b[0];
            return r;
        }
        const Level& lv = levels_[level - 1];
        u64 sub = strides_[level - 1];
        unsigned d = lv.deg;
        auto block = [&](const QVec& v, unsigned k) {
            return QVec(v.begin() + k * sub, v.begin() + (k + 1) * sub);
        };
        std::vector<QVec> work(2 * d - 1, QVec(sub, 0));
        for (unsigned i = 0; i < d; ++i) {
            QVec ai = block(a, i);
            if (std::all_of(ai.begin(), ai.end(), [](const mpq_class& c) { return c == 0; }))
                continue;
            for (unsigned j = 0; j < d; ++j) {
                QVec bj = block(b, j);
                QVec prod = mul_level(level - 1, ai, bj);
                for (u64 t = 0; t < sub; ++t) work[i + j][t] += prod[t];
            }
        }
        for (unsigned k = 2 * d - 2; k >= d && k < work.size(); --k) {
            if (std::all_of(work[k].begin(), work[k].end(),
                            [](const mpq_class& c) { return c == 0; }))
                continue;
            for (unsigned i = 0; i < d; ++i) {
                QVec prod = mul_level(level - 1, work[k], lv.reduction[i]);
                for (u64 t = 0; t < sub; ++t) work[k - d + i][t] += prod[t];
            }
            std::fill(work[k].begin(), work[k].end(), mpq_class(0));
        }
        QVec r(dim_at(level));
        for (unsigned k = 0; k < d; ++k)
            for (u64 t = 0; t < sub; ++t) r[k * sub + t] = work[k][t];
        return r;
    }

    u64 dim_at(std::size_t level) const {
        return level == levels_.size() ? dim_ : strides_[level];
    }

    std::vector<Level> levels_;
    std::vector<u64> strides_;
    u64 dim_ = 1;
};

using RationalRingPtr = std::shared_ptr<const RationalRing>;

inline RationalRingPtr as_rational(const RingPtr& r) {
    auto q = std::dynamic_pointer_cast<const RationalRing>(r);
    if (!q) throw Error("operation requires a rational-kind carrier");
    return q;
}

} // namespace lru
