#pragma once

#include <optional>
#include <set>
#include <vector>

#include "lru/ring.hpp"

namespace lru {

// Additive span of {r*g : r in R, g in gens}: the ideal generated by gens.
inline std::vector<u64> ideal_span(const FiniteRing& r, const std::vector<u64>& gens) {
    std::set<u64> products;
    for (u64 g : gens)
        for (u64 x = 0; x < r.order(); ++x) products.insert(r.mul(x, g));
    std::vector<bool> in(r.order(), false);
    in[r.zero()] = true;
    std::vector<u64> queue{r.zero()};
    for (std::size_t head = 0; head < queue.size(); ++head) {
        u64 s = queue[head];
        for (u64 t : products) {
            u64 v = r.add(s, t);
            if (!in[v]) {
                in[v] = true;
                queue.push_back(v);
            }
        }
    }
    std::vector<u64> out;
    for (u64 x = 0; x < r.order(); ++x)
        if (in[x]) out.push_back(x);
    return out;
}

struct IdealViolation {
    enum class Kind { NotAdditivelyClosed, NotAbsorbing, MissingZero } kind;
    u64 a = 0, b = 0; // witness pair: a,b in I (additive) or a in R, b in I (absorbing)
    std::string describe(const FiniteRing& r) const {
        switch (kind) {
        case Kind::NotAdditivelyClosed:
            return "not additively closed: " + r.print_element(a) + " + " + r.print_element(b);
        case Kind::NotAbsorbing:
            return "not absorbing: " + r.print_element(a) + " * " + r.print_element(b);
        case Kind::MissingZero:
            return "does not contain 0";
        }
        return "?";
    }
};

// Exhaustive ideal test on an element set; first violation in index order.
inline std::optional<IdealViolation> check_ideal(const FiniteRing& r,
                                                 const std::vector<u64>& elems) {
    std::vector<bool> in(r.order(), false);
    for (u64 x : elems) in[x] = true;
    if (!in[r.zero()])
        return IdealViolation{IdealViolation::Kind::MissingZero, 0, 0};
    for (u64 a : elems)
        for (u64 b : elems)
            if (!in[r.add(a, b)])
                return IdealViolation{IdealViolation::Kind::NotAdditivelyClosed, a, b};
    for (u64 x = 0; x < r.order(); ++x)
        for (u64 b : elems)
            if (!in[r.mul(x, b)])
                return IdealViolation{IdealViolation::Kind::NotAbsorbing, x, b};
    return std::nullopt;
}

struct Ideal {
    FiniteRingPtr ring;
    std::vector<u64> elements;   // sorted, contains 0
    std::vector<u64> generators; // greedy minimal generating list
    bool verified = false;
    bool exhaustive = false;

    u64 size() const { return elements.size(); }
    bool contains(u64 x) const {
        return std::binary_search(elements.begin(), elements.end(), x);
    }
    bool is_zero_ideal() const { return elements.size() == 1; }
};

namespace detail {

// Least elements not yet spanned, one at a time.
inline std::vector<u64> extract_generators(const FiniteRing& r, const std::vector<u64>& elems) {
    std::vector<u64> gens;
    std::vector<u64> span{r.zero()};
    for (u64 x : elems) {
        if (std::binary_search(span.begin(), span.end(), x)) continue;
        gens.push_back(x);
        span = ideal_span(r, gens);
    }
    return gens;
}

} // namespace detail

inline Ideal make_ideal(FiniteRingPtr ring, const std::vector<u64>& gens,
                        const Config& cfg = default_config()) {
    Ideal ideal;
    ideal.ring = std::move(ring);
    ideal.elements = ideal_span(*ideal.ring, gens);
    ideal.generators = detail::extract_generators(*ideal.ring, ideal.elements);
    ideal.verified = true; // spans are ideals by construction
    ideal.exhaustive = ideal.ring->order() <= cfg.ideal_exhaustive_bound;
    if (ideal.exhaustive) {
        if (auto v = check_ideal(*ideal.ring, ideal.elements))
            throw InternalCheckError("ideal span failed closure: " + v->describe(*ideal.ring));
    }
    return ideal;
}

// Wraps a claimed element set; throws with a witness when it is not an ideal.
inline Ideal ideal_from_elements(FiniteRingPtr ring, std::vector<u64> elems,
                                 const Config& cfg = default_config()) {
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    Ideal ideal;
    ideal.ring = std::move(ring);
    ideal.elements = std::move(elems);
    ideal.generators = detail::extract_generators(*ideal.ring, ideal.elements);
    if (ideal.ring->order() <= cfg.ideal_exhaustive_bound) {
        if (auto v = check_ideal(*ideal.ring, ideal.elements))
            throw Error("not an ideal: " + v->describe(*ideal.ring));
        ideal.exhaustive = true;
    } else {
        // Generator-driven: the claimed set must equal the span it generates.
        auto span = ideal_span(*ideal.ring, ideal.generators);
        if (span != ideal.elements)
            throw Error("not an ideal: set differs from the span of its generators");
    }
    ideal.verified = true;
    return ideal;
}

// I^n: the ideal generated by all n-fold products of generators of I.
// Stabilizes at the zero ideal at the nilpotency index.
inline Ideal ideal_power(const Ideal& ideal, u64 n, const Config& cfg = default_config()) {
    if (n == 0) throw Error("ideal_power: exponent must be >= 1");
    if (n == 1) return ideal;
    const FiniteRing& r = *ideal.ring;
    std::set<u64> gens(ideal.generators.begin(), ideal.generators.end());
    for (u64 k = 2; k <= n; ++k) {
        std::set<u64> next;
        for (u64 a : gens)
            for (u64 g : ideal.generators) next.insert(r.mul(a, g));
        next.erase(r.zero());
        gens = std::move(next);
        if (gens.empty()) break;
    }
    return make_ideal(ideal.ring, std::vector<u64>(gens.begin(), gens.end()), cfg);
}

} // namespace lru
