#pragma once

#include <vector>

#include "lru/hom.hpp"
#include "lru/ideal.hpp"
#include "lru/ring.hpp"

namespace lru {

struct QuotientResult {
    FiniteRingPtr ring;
    RingHom projection;       // base -> quotient, surjective, kernel = I
    std::vector<u64> section; // quotient index -> canonical base representative
};

// R/I with canonical (least-index) coset representatives. Quotient by the
// zero ideal returns R itself with the identity projection.
inline QuotientResult quotient_ring(const FiniteRingPtr& r, const Ideal& ideal,
                                    const Config& cfg = default_config()) {
    if (ideal.ring.get() != r.get()) throw Error("quotient: ideal belongs to a different ring");
    if (!ideal.verified) throw Error("quotient: ideal not verified");
    u64 n = r->order();
    if (ideal.is_zero_ideal()) {
        QuotientResult res;
        res.ring = r;
        res.projection = identity_hom(r);
        res.section.resize(n);
        std::iota(res.section.begin(), res.section.end(), 0);
        return res;
    }

    std::vector<u64> canon(n, n);
    std::vector<u64> reps;
    for (u64 x = 0; x < n; ++x) {
        if (canon[x] != n) continue;
        // x is the least member of its coset x + I.
        for (u64 i : ideal.elements) canon[r->add(x, i)] = x;
        reps.push_back(x);
    }
    if (n % reps.size() != 0 || n / reps.size() != ideal.size())
        throw InternalCheckError("quotient: |R/I| != |R|/|I|");

    auto spec = std::make_shared<RingSpec>();
    spec->node = RingSpec::Node::Quot;
    spec->base = r->spec();
    spec->quot_gens = ideal.generators;
    auto q = std::make_shared<QuotRing>(spec, r, reps, canon);

    std::vector<u64> proj(n);
    for (u64 x = 0; x < n; ++x) proj[x] = q->project(x);
    QuotientResult res;
    res.ring = q;
    res.projection = make_ring_hom(r, q, std::move(proj), cfg);
    if (!res.projection.is_surjective())
        throw InternalCheckError("quotient projection not surjective");
    if (res.projection.kernel_elements() != ideal.elements)
        throw InternalCheckError("quotient projection kernel differs from the ideal");
    res.section = reps;
    return res;
}

struct FiberProduct {
    FiniteRingPtr ring;   // {(a,b) : f(a) = g(b)}
    RingHom to_first;     // projection onto dom(f)
    RingHom to_second;    // projection onto dom(g)
    bool f_surjective = false;
    bool to_second_surjective = false;
    bool ker_f_square_zero = false;
    bool ker_to_second_square_zero = false;
};

// Pullback of f: A -> C and g: B -> C in the category of commutative rings.
// When f is surjective the projection to B is surjective; when additionally
// ker f has square zero, so does the kernel of that projection. Both facts
// are checked on the constructed carrier and recorded.
inline FiberProduct fiber_product(const RingHom& f, const RingHom& g,
                                  const Config& cfg = default_config()) {
    if (f.codomain.get() != g.codomain.get())
        throw Error("fiber product: homs have different codomains");
    const FiniteRingPtr& a = f.domain;
    const FiniteRingPtr& b = g.domain;
    if (a->order() > cfg.materialization_bound / b->order())
        throw Error("fiber product: pair scan exceeds materialization bound");

    std::vector<u64> members;
    for (u64 ib = 0; ib < b->order(); ++ib)
        for (u64 ia = 0; ia < a->order(); ++ia)
            if (f.map[ia] == g.map[ib]) members.push_back(ia + a->order() * ib);
    std::sort(members.begin(), members.end());

    auto spec = std::make_shared<RingSpec>();
    spec->node = RingSpec::Node::Pullback;
    spec->left = a->spec();
    spec->right = b->spec();
    spec->pullback_codomain = f.codomain->spec();
    spec->pullback_fa = f.map;
    spec->pullback_fb = g.map;
    auto p = std::make_shared<PullbackRing>(spec, a, b, members);

    std::vector<u64> pa(p->order()), pb(p->order());
    for (u64 i = 0; i < p->order(); ++i) {
        auto [x, y] = p->decode(i);
        pa[i] = x;
        pb[i] = y;
    }
    FiberProduct res;
    res.ring = p;
    res.to_first = make_ring_hom(p, a, std::move(pa), cfg);
    res.to_second = make_ring_hom(p, b, std::move(pb), cfg);
    res.f_surjective = f.is_surjective();
    res.to_second_surjective = res.to_second.is_surjective();

    auto square_zero = [](const FiniteRing& r, const std::vector<u64>& ker) {
        for (u64 x : ker)
            for (u64 y : ker)
                if (r.mul(x, y) != r.zero()) return false;
        return true;
    };
    res.ker_f_square_zero = square_zero(*f.domain, f.kernel_elements());
    res.ker_to_second_square_zero = square_zero(*p, res.to_second.kernel_elements());
    return res;
}

} // namespace lru
