#pragma once

#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "lru/ring.hpp"

namespace lru {

// A verified ring homomorphism between finite carriers, stored as a total map.
struct RingHom {
    FiniteRingPtr domain;
    FiniteRingPtr codomain;
    std::vector<u64> map;
    bool verified = false;
    bool exhaustive = false;

    u64 operator()(u64 x) const { return map[x]; }

    bool is_surjective() const {
        std::vector<bool> hit(codomain->order(), false);
        for (u64 v : map) hit[v] = true;
        return std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
    }

    std::vector<u64> kernel_elements() const {
        std::vector<u64> k;
        for (u64 x = 0; x < domain->order(); ++x)
            if (map[x] == codomain->zero()) k.push_back(x);
        return k;
    }

    nlohmann::json to_json() const {
        return nlohmann::json{{"domain", domain->name()},
                              {"codomain", codomain->name()},
                              {"map", map},
                              {"verified", verified},
                              {"exhaustive", exhaustive}};
    }
};

// Checks that `map` preserves 0, 1, + and x. Exhaustive on all pairs for
// small domains, randomized above; throws with a witness on violation.
inline RingHom make_ring_hom(FiniteRingPtr dom, FiniteRingPtr cod, std::vector<u64> map,
                             const Config& cfg = default_config()) {
    if (map.size() != dom->order()) throw Error("ring hom: map size != domain order");
    for (u64 v : map)
        if (v >= cod->order()) throw Error("ring hom: image out of range");
    if (map[dom->zero()] != cod->zero()) throw Error("ring hom: 0 not preserved");
    if (map[dom->one()] != cod->one()) throw Error("ring hom: 1 not preserved");

    u64 n = dom->order();
    RingHom h{std::move(dom), std::move(cod), std::move(map)};
    auto check_pair = [&h](u64 a, u64 b) {
        const FiniteRing& d = *h.domain;
        const FiniteRing& c = *h.codomain;
        if (h.map[d.add(a, b)] != c.add(h.map[a], h.map[b]))
            throw Error("ring hom: addition not preserved at (" + d.print_element(a) + "," +
                        d.print_element(b) + ")");
        if (h.map[d.mul(a, b)] != c.mul(h.map[a], h.map[b]))
            throw Error("ring hom: multiplication not preserved at (" + d.print_element(a) + "," +
                        d.print_element(b) + ")");
    };
    if (n <= cfg.hom_exhaustive_bound) {
        h.domain->ensure_tables(cfg.table_cache_bound);
        for (u64 a = 0; a < n; ++a)
            for (u64 b = a; b < n; ++b) check_pair(a, b);
        h.exhaustive = true;
    } else {
        Rng rng(0x484F4D ^ n); // fixed stream per domain size, reproducible
        for (u64 i = 0; i < cfg.hom_samples; ++i) check_pair(rng.below(n), rng.below(n));
    }
    h.verified = true;
    return h;
}

inline RingHom identity_hom(const FiniteRingPtr& r) {
    std::vector<u64> m(r->order());
    std::iota(m.begin(), m.end(), 0);
    RingHom h{r, r, std::move(m)};
    h.verified = true;
    h.exhaustive = true;
    return h;
}

// g after f; both verified, so only the wiring is checked.
inline RingHom compose(const RingHom& g, const RingHom& f) {
    if (f.codomain.get() != g.domain.get())
        throw Error("hom composition: codomain/domain mismatch");
    std::vector<u64> m(f.map.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = g.map[f.map[i]];
    RingHom h{f.domain, g.codomain, std::move(m)};
    h.verified = f.verified && g.verified;
    h.exhaustive = f.exhaustive && g.exhaustive;
    return h;
}

} // namespace lru
