#pragma once

#include <string>
#include <vector>

#include "lru/quotient.hpp"
#include "lru/ring.hpp"
#include "lru/ringspec.hpp"
#include "lru/rng.hpp"

namespace lru {

// --------------------------------------------------------------------------
// Dense polynomials over F_p, ascending coefficients. Only used to pick the
// defining modulus of GF(p^d): the lexicographically least monic irreducible,
// ordering coefficient tuples (c_{d-1},...,c_0) as base-p integers.
// --------------------------------------------------------------------------
namespace fppoly {

using Poly = std::vector<u64>;

inline void trim(Poly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

inline u64 inv_mod(u64 a, u64 p) {
    // Fermat; p prime and a != 0 mod p.
    u64 r = 1, b = a % p, e = p - 2;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r;
}

inline Poly rem(Poly a, const Poly& b, u64 p) {
    u64 lead_inv = inv_mod(b.back(), p);
    while (a.size() >= b.size()) {
        u64 f = a.back() * lead_inv % p;
        if (f != 0) {
            std::size_t off = a.size() - b.size();
            for (std::size_t i = 0; i < b.size(); ++i)
                a[off + i] = (a[off + i] + p * p - f * b[i] % p) % p;
        }
        a.pop_back();
        trim(a);
        if (a.size() < b.size()) break;
    }
    return a;
}

inline bool divides(const Poly& g, const Poly& f, u64 p) {
    return rem(f, g, p).empty();
}

inline bool is_irreducible(const Poly& f, u64 p) {
    std::size_t d = f.size() - 1;
    if (d == 0) return false;
    if (d == 1) return true;
    for (std::size_t e = 1; 2 * e <= d; ++e) {
        u64 count = pow_u64_checked(p, static_cast<unsigned>(e), u64(1) << 62);
        for (u64 v = 0; v < count; ++v) {
            Poly g(e + 1, 0);
            g[e] = 1;
            u64 t = v;
            for (std::size_t i = 0; i < e; ++i) {
                g[i] = t % p;
                t /= p;
            }
            if (divides(g, f, p)) return false;
        }
    }
    return true;
}

inline Poly least_irreducible(u64 p, unsigned d) {
    u64 count = pow_u64_checked(p, d, u64(1) << 62);
    for (u64 v = 0; v < count; ++v) {
        Poly f(d + 1, 0);
        f[d] = 1;
        u64 t = v;
        for (unsigned i = 0; i < d; ++i) {
            f[i] = t % p;
            t /= p;
        }
        if (is_irreducible(f, p)) return f;
    }
    throw InternalCheckError("no irreducible polynomial found over F_" + std::to_string(p));
}

} // namespace fppoly

// --------------------------------------------------------------------------
// build_ring
// --------------------------------------------------------------------------

inline RingPtr build_ring(const RingSpecPtr& spec, const Config& cfg = default_config());

namespace detail {

// Modulus tail (coefficients of x^0..x^{d-1}) evaluated in a finite base.
inline std::vector<u64> eval_modulus_finite(const RingSpec& spec, const FiniteRing& base) {
    unsigned deg = spec.modulus_degree();
    auto gens = base.scope_generators();
    std::vector<u64> coeffs(deg + 1, base.zero());
    for (const auto& t : spec.modulus) {
        u64 v = base.from_int(t.coeff);
        for (std::size_t i = 0; i + 1 < t.exps.size(); ++i) {
            if (t.exps[i] == 0) continue;
            if (i >= gens.size()) throw Error("modulus references a variable without a carrier");
            v = base.mul(v, base.pow(gens[i], t.exps[i]));
        }
        unsigned k = t.exps.back();
        coeffs[k] = base.add(coeffs[k], v);
    }
    if (coeffs[deg] != base.one()) throw Error("modulus is not monic over the base ring");
    coeffs.pop_back();
    return coeffs;
}

inline std::vector<QVec> eval_modulus_rational(const RingSpec& spec, const RationalRing& base) {
    unsigned deg = spec.modulus_degree();
    auto gens = base.scope_generators();
    std::vector<QVec> coeffs(deg + 1, base.zero());
    for (const auto& t : spec.modulus) {
        QVec v = base.from_mpq(mpq_class(t.coeff));
        for (std::size_t i = 0; i + 1 < t.exps.size(); ++i) {
            if (t.exps[i] == 0) continue;
            if (i >= gens.size()) throw Error("modulus references a variable without a carrier");
            v = base.mul(v, base.pow(gens[i], t.exps[i]));
        }
        unsigned k = t.exps.back();
        coeffs[k] = base.add(coeffs[k], v);
    }
    if (coeffs[deg] != base.one()) throw Error("modulus is not monic over the base ring");
    coeffs.pop_back();
    return coeffs;
}

} // namespace detail

inline RingPtr build_ring(const RingSpecPtr& spec, const Config& cfg) {
    switch (spec->node) {
    case RingSpec::Node::Zmod: {
        if (spec->n < 2) throw Error("Z/n requires n >= 2");
        if (spec->n > cfg.materialization_bound)
            throw Error("ring order exceeds materialization bound");
        return std::make_shared<ZmodRing>(spec, spec->n);
    }
    case RingSpec::Node::GF: {
        auto [p, d] = prime_power(spec->n);
        if (p == 0) throw Error("GF(q) requires q a prime power");
        if (spec->n > cfg.materialization_bound)
            throw Error("ring order exceeds materialization bound");
        if (d == 1) return std::make_shared<ZmodRing>(spec, p);
        auto base_spec = std::make_shared<RingSpec>();
        base_spec->node = RingSpec::Node::Zmod;
        base_spec->n = p;
        auto base = std::make_shared<ZmodRing>(base_spec, p);
        fppoly::Poly f = fppoly::least_irreducible(p, d);
        f.pop_back(); // tail only; leading coefficient is 1
        return std::make_shared<PolyQuotRing>(spec, base, "x", f, spec->n);
    }
    case RingSpec::Node::QQ:
        return std::make_shared<RationalRing>(spec);
    case RingSpec::Node::PolyQuot: {
        RingPtr base = build_ring(spec->base, cfg);
        unsigned deg = spec->modulus_degree();
        if (deg == 0) throw Error("modulus must have degree >= 1");
        if (base->finite()) {
            auto fb = as_finite(base);
            u64 order = pow_u64_checked(fb->order(), deg, cfg.materialization_bound);
            if (order > cfg.materialization_bound)
                throw Error("ring order exceeds materialization bound");
            auto tail = detail::eval_modulus_finite(*spec, *fb);
            return std::make_shared<PolyQuotRing>(spec, fb, spec->var, tail, order);
        }
        auto rb = as_rational(base);
        auto tail = detail::eval_modulus_rational(*spec, *rb);
        RationalRing::Level lv;
        lv.var = spec->var;
        lv.deg = deg;
        lv.reduction.reserve(deg);
        for (auto& c : tail) lv.reduction.push_back(rb->neg(c));
        auto levels = rb->levels();
        levels.push_back(std::move(lv));
        return std::make_shared<RationalRing>(spec, std::move(levels));
    }
    case RingSpec::Node::Product: {
        RingPtr l = build_ring(spec->left, cfg);
        RingPtr r = build_ring(spec->right, cfg);
        if (!l->finite() || !r->finite())
            throw Error("product of rational-kind carriers is not supported");
        auto lf = as_finite(l), rf = as_finite(r);
        if (lf->order() > cfg.materialization_bound / rf->order())
            throw Error("ring order exceeds materialization bound");
        return std::make_shared<ProductRing>(spec, lf, rf);
    }
    case RingSpec::Node::Table: {
        if (spec->table_order > 4096) throw Error("table ring order capped at 4096");
        return std::make_shared<TableRing>(spec, spec->table_order, spec->add_table,
                                           spec->mul_table);
    }
    case RingSpec::Node::Quot: {
        auto base = as_finite(build_ring(spec->base, cfg));
        Ideal ideal = make_ideal(base, spec->quot_gens, cfg);
        return quotient_ring(base, ideal, cfg).ring;
    }
    case RingSpec::Node::Pullback: {
        auto a = as_finite(build_ring(spec->left, cfg));
        auto b = as_finite(build_ring(spec->right, cfg));
        auto c = as_finite(build_ring(spec->pullback_codomain, cfg));
        RingHom f = make_ring_hom(a, c, spec->pullback_fa, cfg);
        RingHom g = make_ring_hom(b, c, spec->pullback_fb, cfg);
        return fiber_product(f, g, cfg).ring;
    }
    }
    throw Error("unknown ring spec node");
}

inline RingPtr build_ring(std::string_view text, const Config& cfg = default_config()) {
    return build_ring(parse_ring_spec(text), cfg);
}

// --------------------------------------------------------------------------
// Commutative ring axioms: exhaustive over all triples for small carriers,
// randomized (seeded, reproducible) above the bound.
// --------------------------------------------------------------------------

struct AxiomViolation {
    std::string axiom;
    u64 a = 0, b = 0, c = 0;
};

struct AxiomReport {
    bool pass = true;
    bool exhaustive = false;
    u64 checked_triples = 0;
    std::vector<AxiomViolation> violations;

    nlohmann::json to_json() const {
        nlohmann::json v = nlohmann::json::array();
        for (const auto& x : violations)
            v.push_back({{"axiom", x.axiom}, {"a", x.a}, {"b", x.b}, {"c", x.c}});
        return {{"pass", pass}, {"exhaustive", exhaustive}, {"checked_triples", checked_triples},
                {"violations", v}};
    }
};

inline AxiomReport ring_axioms_check(const FiniteRing& r, const Config& cfg = default_config()) {
    AxiomReport rep;
    auto fail = [&](const char* axiom, u64 a, u64 b, u64 c) {
        rep.pass = false;
        if (rep.violations.size() < 8) rep.violations.push_back({axiom, a, b, c});
    };
    u64 n = r.order();
    for (u64 a = 0; a < n; ++a) {
        if (r.add(r.zero(), a) != a) fail("additive identity", a, 0, 0);
        if (r.mul(r.one(), a) != a) fail("multiplicative identity", a, 0, 0);
        if (r.add(a, r.neg(a)) != r.zero()) fail("additive inverse", a, 0, 0);
    }
    auto triple = [&](u64 a, u64 b, u64 c) {
        if (r.add(r.add(a, b), c) != r.add(a, r.add(b, c))) fail("additive associativity", a, b, c);
        if (r.mul(r.mul(a, b), c) != r.mul(a, r.mul(b, c)))
            fail("multiplicative associativity", a, b, c);
        if (r.mul(a, r.add(b, c)) != r.add(r.mul(a, b), r.mul(a, c)))
            fail("distributivity", a, b, c);
        if (r.add(a, b) != r.add(b, a)) fail("additive commutativity", a, b, 0);
        if (r.mul(a, b) != r.mul(b, a)) fail("multiplicative commutativity", a, b, 0);
        ++rep.checked_triples;
    };
    if (n <= cfg.axiom_exhaustive_bound) {
        r.ensure_tables(cfg.table_cache_bound);
        for (u64 a = 0; a < n; ++a)
            for (u64 b = 0; b < n; ++b)
                for (u64 c = 0; c < n; ++c) triple(a, b, c);
        rep.exhaustive = true;
    } else {
        Rng rng(0xA210A5ULL ^ n);
        for (u64 i = 0; i < cfg.axiom_samples; ++i)
            triple(rng.below(n), rng.below(n), rng.below(n));
    }
    return rep;
}

// Rational kind: bilinearity reduces every law to basis combinations.
inline AxiomReport ring_axioms_check(const RationalRing& r) {
    AxiomReport rep;
    rep.exhaustive = true;
    auto fail = [&](const char* axiom, u64 a, u64 b, u64 c) {
        rep.pass = false;
        if (rep.violations.size() < 8) rep.violations.push_back({axiom, a, b, c});
    };
    u64 d = r.dimension();
    for (u64 i = 0; i < d; ++i) {
        if (r.mul(r.one(), r.basis_elem(i)) != r.basis_elem(i))
            fail("multiplicative identity", i, 0, 0);
        for (u64 j = 0; j < d; ++j) {
            if (r.mul(r.basis_elem(i), r.basis_elem(j)) != r.mul(r.basis_elem(j), r.basis_elem(i)))
                fail("multiplicative commutativity", i, j, 0);
            for (u64 k = 0; k < d; ++k) {
                QVec lhs = r.mul(r.mul(r.basis_elem(i), r.basis_elem(j)), r.basis_elem(k));
                QVec rhs = r.mul(r.basis_elem(i), r.mul(r.basis_elem(j), r.basis_elem(k)));
                if (lhs != rhs) fail("multiplicative associativity", i, j, k);
                ++rep.checked_triples;
            }
        }
    }
    return rep;
}

} // namespace lru
