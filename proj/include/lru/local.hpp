#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "lru/cert.hpp"
#include "lru/hom.hpp"
#include "lru/ideal.hpp"
#include "lru/quotient.hpp"
#include "lru/ring.hpp"

namespace lru {

// --------------------------------------------------------------------------
// Dense polynomials over a finite field carrier; used to recognize towers
// B[x]/(f) as local rings by factoring the reduced modulus.
// --------------------------------------------------------------------------
namespace kpoly {

using Poly = std::vector<u64>; // ascending coefficients, indices into the field

inline void trim(const FiniteRing& k, Poly& p) {
    while (!p.empty() && p.back() == k.zero()) p.pop_back();
}

inline u64 field_inv(const FiniteRing& k, u64 a) { return k.pow(a, k.order() - 2); }

inline Poly mul(const FiniteRing& k, const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly c(a.size() + b.size() - 1, k.zero());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            c[i + j] = k.add(c[i + j], k.mul(a[i], b[j]));
    trim(k, c);
    return c;
}

inline Poly rem(const FiniteRing& k, Poly a, const Poly& b) {
    trim(k, a);
    u64 lead_inv = field_inv(k, b.back());
    while (a.size() >= b.size()) {
        u64 f = k.mul(a.back(), lead_inv);
        std::size_t off = a.size() - b.size();
        for (std::size_t i = 0; i < b.size(); ++i)
            a[off + i] = k.sub(a[off + i], k.mul(f, b[i]));
        trim(k, a);
    }
    return a;
}

inline bool divides(const FiniteRing& k, const Poly& g, const Poly& f) {
    return rem(k, f, g).empty();
}

inline Poly power(const FiniteRing& k, Poly g, u64 e) {
    Poly r{k.one()};
    while (e) {
        if (e & 1) r = mul(k, r, g);
        g = mul(k, g, g);
        e >>= 1;
    }
    return r;
}

// Least monic divisor of f of positive degree (necessarily irreducible),
// enumerating coefficient tuples (c_{e-1},...,c_0) as base-|k| integers.
inline std::optional<Poly> least_monic_divisor(const FiniteRing& k, const Poly& f) {
    u64 q = k.order();
    std::size_t d = f.size() - 1;
    for (std::size_t e = 1; e <= d; ++e) {
        u64 count = pow_u64_checked(q, static_cast<unsigned>(e), u64(1) << 62);
        for (u64 v = 0; v < count; ++v) {
            Poly g(e + 1, k.zero());
            g[e] = k.one();
            u64 t = v;
            for (std::size_t i = 0; i < e; ++i) {
                g[i] = t % q;
                t /= q;
            }
            if (divides(k, g, f)) return g;
        }
    }
    return std::nullopt;
}

} // namespace kpoly

// --------------------------------------------------------------------------
// Structural recognition of local carriers: a total reduction map onto the
// residue field with nilpotent kernel. Covers Z/p^a, monic quotient towers
// whose reduced modulus is a power of one irreducible, and quotients of
// recognized rings. Everything else falls back to exhaustive unit pairing.
// --------------------------------------------------------------------------

struct Recognition {
    FiniteRingPtr field;
    std::vector<u64> reduce; // total map, ring hom with nilpotent kernel
};

inline std::optional<Recognition> recognize_local(const FiniteRingPtr& r);

namespace detail {

inline std::optional<Recognition> recognize_zmod(const FiniteRingPtr& r, const ZmodRing& z) {
    auto [p, a] = prime_power(z.modulus());
    if (p == 0) return std::nullopt;
    Recognition rec;
    if (a == 1) {
        rec.field = r;
        rec.reduce.resize(p);
        std::iota(rec.reduce.begin(), rec.reduce.end(), 0);
        return rec;
    }
    auto spec = std::make_shared<RingSpec>();
    spec->node = RingSpec::Node::Zmod;
    spec->n = p;
    rec.field = std::make_shared<ZmodRing>(spec, p);
    rec.reduce.resize(z.modulus());
    for (u64 x = 0; x < z.modulus(); ++x) rec.reduce[x] = x % p;
    return rec;
}

inline std::optional<Recognition> recognize_polyquot(const FiniteRingPtr& r,
                                                     const PolyQuotRing& pq) {
    auto rec_b = recognize_local(pq.base());
    if (!rec_b) return std::nullopt;
    const FiniteRing& kb = *rec_b->field;
    // Reduced modulus over the base residue field.
    kpoly::Poly fbar(pq.degree() + 1, kb.zero());
    fbar[pq.degree()] = kb.one();
    for (unsigned i = 0; i < pq.degree(); ++i) fbar[i] = rec_b->reduce[pq.modulus_tail()[i]];
    auto g = kpoly::least_monic_divisor(kb, fbar);
    if (!g) return std::nullopt;
    std::size_t gd = g->size() - 1;
    if (pq.degree() % gd != 0) return std::nullopt;
    if (kpoly::power(kb, *g, pq.degree() / gd) != fbar) return std::nullopt; // not local

    Recognition rec;
    std::function<u64(const kpoly::Poly&)> encode;
    if (gd == 1) {
        rec.field = rec_b->field;
        u64 root = kb.neg((*g)[0]);
        encode = [&kb, root](const kpoly::Poly& p) {
            u64 acc = kb.zero();
            for (std::size_t i = p.size(); i-- > 0;) acc = kb.add(kb.mul(acc, root), p[i]);
            return acc;
        };
    } else {
        kpoly::Poly tail(g->begin(), g->end() - 1);
        auto field =
            std::make_shared<PolyQuotRing>(nullptr, rec_b->field, pq.var(), tail,
                                           pow_u64_checked(kb.order(), static_cast<unsigned>(gd),
                                                           u64(1) << 62));
        rec.field = field;
        encode = [field, gd](const kpoly::Poly& p) {
            std::vector<u64> digits(gd, 0);
            for (std::size_t i = 0; i < p.size(); ++i) digits[i] = p[i];
            return field->from_digits(digits);
        };
    }
    rec.reduce.resize(pq.order());
    for (u64 x = 0; x < pq.order(); ++x) {
        auto digits = pq.digits(x);
        kpoly::Poly p(digits.size());
        for (std::size_t i = 0; i < digits.size(); ++i) p[i] = rec_b->reduce[digits[i]];
        kpoly::trim(kb, p);
        if (!p.empty() && p.size() >= g->size()) p = kpoly::rem(kb, p, *g);
        rec.reduce[x] = encode(p);
    }
    return rec;
}

inline std::optional<Recognition> recognize_quot(const FiniteRingPtr& r, const QuotRing& q) {
    auto rec_b = recognize_local(q.base());
    if (!rec_b) return std::nullopt;
    Recognition rec;
    rec.field = rec_b->field;
    rec.reduce.resize(q.order());
    for (u64 i = 0; i < q.order(); ++i) rec.reduce[i] = rec_b->reduce[q.rep(i)];
    // Well-defined on cosets only when the quotient ideal sits inside the kernel.
    for (u64 x = 0; x < q.base()->order(); ++x)
        if (rec_b->reduce[x] != rec.reduce[q.project(x)]) return std::nullopt;
    return rec;
}

} // namespace detail

inline std::optional<Recognition> recognize_local(const FiniteRingPtr& r) {
    if (auto z = std::dynamic_pointer_cast<const ZmodRing>(r))
        return detail::recognize_zmod(r, *z);
    if (auto pq = std::dynamic_pointer_cast<const PolyQuotRing>(r))
        return detail::recognize_polyquot(r, *pq);
    if (auto q = std::dynamic_pointer_cast<const QuotRing>(r))
        return detail::recognize_quot(r, *q);
    return std::nullopt;
}

// --------------------------------------------------------------------------
// Units. Structural criteria where available, exhaustive pairing otherwise;
// the sorted unit list is cached on the carrier.
// --------------------------------------------------------------------------

inline const std::vector<u64>& units(const FiniteRingPtr& r,
                                     const Config& cfg = default_config()) {
    if (r->order() == 1) throw ZeroRingError();
    {
        std::lock_guard<std::mutex> lock(r->cache_mu_);
        if (r->units_cached_) return r->units_cache_;
    }
    std::vector<u64> out;
    u64 n = r->order();
    if (auto z = std::dynamic_pointer_cast<const ZmodRing>(r)) {
        for (u64 x = 0; x < n; ++x)
            if (gcd_u64(x, n) == 1) out.push_back(x);
    } else if (auto prod = std::dynamic_pointer_cast<const ProductRing>(r)) {
        const auto& ua = units(prod->first(), cfg);
        const auto& ub = units(prod->second(), cfg);
        for (u64 b : ub)
            for (u64 a : ua) out.push_back(prod->encode(a, b));
        std::sort(out.begin(), out.end());
    } else if (auto rec = recognize_local(r)) {
        u64 z = as_finite(rec->field)->zero();
        for (u64 x = 0; x < n; ++x)
            if (rec->reduce[x] != z) out.push_back(x);
    } else {
        if (n > cfg.units_pairing_bound)
            throw Error("unit enumeration: no structural criterion and order " +
                        std::to_string(n) + " exceeds the pairing bound");
        r->ensure_tables(cfg.table_cache_bound);
        std::vector<bool> mask(n, false);
        for (u64 x = 0; x < n; ++x) {
            if (mask[x]) continue;
            for (u64 y = x; y < n; ++y)
                if (r->mul(x, y) == r->one()) {
                    mask[x] = true;
                    mask[y] = true;
                    break;
                }
        }
        for (u64 x = 0; x < n; ++x)
            if (mask[x]) out.push_back(x);
    }
    std::lock_guard<std::mutex> lock(r->cache_mu_);
    if (!r->units_cached_) {
        r->units_cache_ = std::move(out);
        r->units_cached_ = true;
    }
    return r->units_cache_;
}

inline bool is_unit(const FiniteRingPtr& r, u64 x, const Config& cfg = default_config()) {
    const auto& u = units(r, cfg);
    return std::binary_search(u.begin(), u.end(), x);
}

// Multiplicative inverse of a unit.
inline u64 unit_inverse(const FiniteRingPtr& r, u64 x, const Config& cfg = default_config()) {
    u64 m = units(r, cfg).size();
    u64 inv = r->pow(x, m - 1);
    if (r->mul(x, inv) != r->one()) throw InternalCheckError("unit inverse failed");
    return inv;
}

// --------------------------------------------------------------------------
// Locality: a finite ring is local iff its non-units are additively closed.
// Returns the maximal ideal, or throws NotLocalError with the first witness
// pair of non-units whose sum is a unit.
// --------------------------------------------------------------------------

inline Ideal jacobson_maximal(const FiniteRingPtr& r, const Config& cfg = default_config()) {
    if (r->order() == 1) throw ZeroRingError();
    const auto& us = units(r, cfg);
    std::vector<bool> unit_mask(r->order(), false);
    for (u64 u : us) unit_mask[u] = true;
    std::vector<u64> non_units;
    for (u64 x = 0; x < r->order(); ++x)
        if (!unit_mask[x]) non_units.push_back(x);

    if (r->order() <= cfg.ideal_exhaustive_bound) {
        for (std::size_t i = 0; i < non_units.size(); ++i)
            for (std::size_t j = i; j < non_units.size(); ++j)
                if (unit_mask[r->add(non_units[i], non_units[j])])
                    throw NotLocalError("not local: " + r->print_element(non_units[i]) + " + " +
                                            r->print_element(non_units[j]) +
                                            " is a unit",
                                        non_units[i], non_units[j]);
        return ideal_from_elements(r, non_units, cfg);
    }

    // Above the exhaustive bound only structurally recognized carriers are
    // accepted; the kernel of the reduction is the maximal ideal.
    auto rec = recognize_local(r);
    if (!rec)
        throw Error("locality test: order " + std::to_string(r->order()) +
                    " exceeds the exhaustive bound and no structural criterion applies");
    Ideal ideal;
    ideal.ring = r;
    ideal.elements = non_units;
    ideal.generators = detail::extract_generators(*r, non_units);
    ideal.verified = true;
    ideal.exhaustive = false;
    return ideal;
}

// --------------------------------------------------------------------------
// LocalStructure: maximal ideal, M-adic filtration, residue field with a
// fixed multiplicative generator, characteristics.
// --------------------------------------------------------------------------

struct LocalStructure {
    FiniteRingPtr ring;
    Ideal max_ideal;
    std::vector<Ideal> filtration; // M^1, ..., M^e (the last is the zero ideal)
    u64 nilpotency_index = 1;      // least e with M^e = 0
    FiniteRingPtr residue;
    RingHom projection;      // R -> k
    std::vector<u64> lift;   // k index -> canonical representative in R
    u64 residue_generator = 0; // least-index generator of k*
    u64 char_ring = 0;
    u64 char_residue = 0;
    u64 residue_order = 0;

    const std::vector<u64>& unit_set(const Config& cfg = default_config()) const {
        return units(ring, cfg);
    }
    u64 project(u64 x) const { return projection.map[x]; }
};

// Multiplicative order of a unit x in a group of order m.
inline u64 multiplicative_order(const FiniteRing& r, u64 x, u64 group_order) {
    u64 o = group_order;
    for (auto& [p, e] : factorize(group_order)) {
        for (unsigned i = 0; i < e; ++i) {
            if (r.pow(x, o / p) == r.one())
                o /= p;
            else
                break;
        }
    }
    return o;
}

inline LocalStructure local_structure(const FiniteRingPtr& r,
                                      const Config& cfg = default_config()) {
    LocalStructure ls;
    ls.ring = r;
    ls.max_ideal = jacobson_maximal(r, cfg);

    ls.filtration.push_back(ls.max_ideal);
    while (!ls.filtration.back().is_zero_ideal()) {
        if (ls.filtration.size() > r->order())
            throw InternalCheckError("maximal ideal is not nilpotent");
        ls.filtration.push_back(ideal_power(ls.max_ideal, ls.filtration.size() + 1, cfg));
    }
    ls.nilpotency_index = ls.filtration.size();

    QuotientResult q = quotient_ring(r, ls.max_ideal, cfg);
    ls.residue = q.ring;
    ls.projection = std::move(q.projection);
    ls.lift = std::move(q.section);
    ls.residue_order = ls.residue->order();

    // Field check: every nonzero element invertible.
    if (units(ls.residue, cfg).size() != ls.residue_order - 1)
        throw InternalCheckError("residue carrier is not a field");

    u64 best_ord = 0, best = 1;
    for (u64 x = 1; x < ls.residue_order; ++x) {
        u64 o = multiplicative_order(*ls.residue, x, ls.residue_order - 1);
        if (o > best_ord) {
            best_ord = o;
            best = x;
        }
    }
    if (best_ord != ls.residue_order - 1)
        throw InternalCheckError("residue field has no multiplicative generator");
    ls.residue_generator = best;

    ls.char_ring = r->characteristic();
    ls.char_residue = ls.residue->characteristic();
    if (ls.char_ring % ls.char_residue != 0)
        throw InternalCheckError("char(k) does not divide char(R)");
    return ls;
}

inline std::pair<u64, u64> characteristics(const LocalStructure& ls) {
    return {ls.char_ring, ls.char_residue};
}

// |R| = p^a with p = char(k). A failure here would falsify the finite
// local order theorem, so it is reported as an internal check error.
inline std::pair<u64, unsigned> local_order_check(const LocalStructure& ls) {
    auto [p, a] = prime_power(ls.ring->order());
    if (p == 0)
        throw InternalCheckError("finite local ring of non-prime-power order " +
                                 std::to_string(ls.ring->order()));
    if (p != ls.char_residue)
        throw InternalCheckError("residue characteristic differs from the order prime");
    return {p, a};
}

// --------------------------------------------------------------------------
// The unit-group exact sequence 1 -> 1+I -> R* -> (R/I)* -> 1 for an ideal I
// inside the radical: checks that 1+I is a subgroup of R*, that reduction is
// surjective on units with kernel exactly 1+I, and the order equation.
// --------------------------------------------------------------------------

inline Certificate verify_unit_sequence(const FiniteRingPtr& r, const Ideal& ideal,
                                        const Config& cfg = default_config()) {
    nlohmann::json payload;
    payload["ring"] = r->name();
    const auto& us = units(r, cfg);
    payload["units"] = us.size();
    payload["ideal_size"] = ideal.size();

    auto obstruction = [&](const std::string& why) {
        return Certificate{Certificate::Kind::Obstruction, why, payload};
    };

    // (a) 1 + I is a subgroup of R*.
    std::vector<u64> one_plus;
    for (u64 i : ideal.elements) one_plus.push_back(r->add(r->one(), i));
    std::sort(one_plus.begin(), one_plus.end());
    for (u64 u : one_plus)
        if (!is_unit(r, u, cfg)) {
            payload["witness"] = r->print_element(u);
            return obstruction("1+I contains the non-unit " + r->print_element(u) +
                               " (I is not inside the radical)");
        }
    for (u64 u : one_plus)
        for (u64 v : one_plus) {
            u64 w = r->mul(u, v);
            if (!std::binary_search(one_plus.begin(), one_plus.end(), w)) {
                payload["witness"] = r->print_element(u) + "*" + r->print_element(v);
                return obstruction("1+I is not closed under multiplication");
            }
        }
    payload["one_plus_ideal"] = one_plus.size();

    // (b) the reduction R* -> (R/I)* is surjective with kernel exactly 1+I.
    QuotientResult q = quotient_ring(r, ideal, cfg);
    const auto& qu = units(q.ring, cfg);
    payload["quotient_units"] = qu.size();
    std::vector<u64> image, kernel;
    for (u64 u : us) {
        u64 v = q.projection.map[u];
        image.push_back(v);
        if (v == q.ring->one()) kernel.push_back(u);
    }
    std::sort(image.begin(), image.end());
    image.erase(std::unique(image.begin(), image.end()), image.end());
    std::sort(kernel.begin(), kernel.end());
    if (image != qu) return obstruction("R* -> (R/I)* is not surjective");
    if (kernel != one_plus) return obstruction("kernel of R* -> (R/I)* differs from 1+I");

    // (c) |R*| = |1+I| * |(R/I)*|.
    if (us.size() != one_plus.size() * qu.size())
        return obstruction("|R*| != |1+I| * |(R/I)*|");

    payload["order_equation"] = std::to_string(us.size()) + " = " +
                                std::to_string(one_plus.size()) + " * " +
                                std::to_string(qu.size());
    return Certificate{Certificate::Kind::Witness,
                       "1 -> 1+I -> R* -> (R/I)* -> 1 is exact", payload};
}

inline Certificate verify_unit_sequence(const FiniteRingPtr& r,
                                        const Config& cfg = default_config()) {
    return verify_unit_sequence(r, jacobson_maximal(r, cfg), cfg);
}

} // namespace lru
