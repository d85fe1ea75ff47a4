#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "lru/local.hpp"
#include "lru/numutil.hpp"
#include "lru/ring.hpp"

namespace lru {

// A finite abelian group carrier. Labels are arbitrary u64 ids (typically
// ring element indices); `elems` is kept ascending for determinism.
struct FinAbGroup {
    std::vector<u64> elems;
    std::function<u64(u64, u64)> op;
    u64 id = 0;
    std::unordered_map<u64, u64> pos; // label -> index into elems

    u64 order() const { return elems.size(); }
    bool contains(u64 x) const { return pos.count(x) != 0; }

    u64 pow(u64 x, u64 e) const {
        u64 r = id, b = x;
        while (e) {
            if (e & 1) r = op(r, b);
            b = op(b, b);
            e >>= 1;
        }
        return r;
    }

    u64 inverse(u64 x) const { return pow(x, order() - 1); }

    u64 elem_order(u64 x) const {
        u64 o = order();
        for (auto& [p, e] : factorize(o))
            for (unsigned i = 0; i < e && pow(x, o / p) == id; ++i) o /= p;
        return o;
    }
};

using GroupPtr = std::shared_ptr<const FinAbGroup>;

inline GroupPtr make_group(std::vector<u64> elems, std::function<u64(u64, u64)> op, u64 id) {
    auto g = std::make_shared<FinAbGroup>();
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    g->elems = std::move(elems);
    g->op = std::move(op);
    g->id = id;
    for (u64 i = 0; i < g->elems.size(); ++i) g->pos[g->elems[i]] = i;
    return g;
}

inline GroupPtr unit_group(const FiniteRingPtr& r, const Config& cfg = default_config()) {
    return make_group(units(r, cfg), [r](u64 a, u64 b) { return r->mul(a, b); }, r->one());
}

inline GroupPtr additive_group(const FiniteRingPtr& r) {
    std::vector<u64> all(r->order());
    std::iota(all.begin(), all.end(), 0);
    return make_group(std::move(all), [r](u64 a, u64 b) { return r->add(a, b); }, r->zero());
}

inline GroupPtr subgroup(const GroupPtr& g, std::vector<u64> elems) {
    for (u64 x : elems)
        if (!g->contains(x)) throw Error("subgroup: element not in parent carrier");
    return make_group(std::move(elems), g->op, g->id);
}

// The full m-torsion subgroup {x : x^m = 1}.
inline GroupPtr torsion_subgroup(const GroupPtr& g, u64 m) {
    std::vector<u64> t;
    for (u64 x : g->elems)
        if (g->pow(x, m) == g->id) t.push_back(x);
    return subgroup(g, std::move(t));
}

struct GroupHom {
    GroupPtr domain, codomain;
    std::vector<u64> map; // by domain position -> codomain label
    bool verified = false;
    bool exhaustive = false;

    u64 operator()(u64 label) const { return map[domain->pos.at(label)]; }

    bool is_bijective() const {
        if (domain->order() != codomain->order()) return false;
        std::vector<bool> hit(codomain->order(), false);
        for (u64 v : map) {
            auto it = codomain->pos.find(v);
            if (it == codomain->pos.end() || hit[it->second]) return false;
            hit[it->second] = true;
        }
        return true;
    }

    nlohmann::json to_json() const {
        nlohmann::json m = nlohmann::json::array();
        for (u64 i = 0; i < map.size(); ++i)
            m.push_back({{"from", domain->elems[i]}, {"to", map[i]}});
        return {{"map", m}, {"verified", verified}, {"exhaustive", exhaustive}};
    }
};

inline GroupHom make_group_hom(GroupPtr dom, GroupPtr cod, std::vector<u64> map,
                               const Config& cfg = default_config()) {
    if (map.size() != dom->order()) throw Error("group hom: map size != domain order");
    for (u64 v : map)
        if (!cod->contains(v)) throw Error("group hom: image not in codomain");
    if (map[dom->pos.at(dom->id)] != cod->id) throw Error("group hom: identity not preserved");
    GroupHom h{std::move(dom), std::move(cod), std::move(map)};
    u64 n = h.domain->order();
    auto check = [&h](u64 i, u64 j) {
        u64 a = h.domain->elems[i], b = h.domain->elems[j];
        u64 ab = h.domain->op(a, b);
        if (h.codomain->op(h.map[i], h.map[j]) != h.map[h.domain->pos.at(ab)])
            throw Error("group hom: operation not preserved at (" + std::to_string(a) + "," +
                        std::to_string(b) + ")");
    };
    if (n * n <= cfg.hom_samples * 4 || n <= 2048) {
        for (u64 i = 0; i < n; ++i)
            for (u64 j = i; j < n; ++j) check(i, j);
        h.exhaustive = true;
    } else {
        Rng rng(0x6B0A ^ n);
        for (u64 s = 0; s < cfg.hom_samples; ++s) check(rng.below(n), rng.below(n));
    }
    h.verified = true;
    return h;
}

inline GroupHom inclusion_hom(const GroupPtr& sub, const GroupPtr& parent,
                              const Config& cfg = default_config()) {
    return make_group_hom(sub, parent, sub->elems, cfg);
}

struct QuotientGroup {
    GroupPtr group;                   // cosets, labelled by least member
    std::unordered_map<u64, u64> rep; // parent label -> coset representative
};

inline QuotientGroup quotient_group(const GroupPtr& g, const GroupPtr& h) {
    QuotientGroup q;
    std::vector<u64> reps;
    for (u64 x : g->elems) {
        if (q.rep.count(x)) continue;
        reps.push_back(x); // least member of its coset, elems ascend
        for (u64 s : h->elems) q.rep[g->op(x, s)] = x;
    }
    auto rep_map = std::make_shared<std::unordered_map<u64, u64>>(q.rep);
    auto op = [g, rep_map](u64 a, u64 b) { return rep_map->at(g->op(a, b)); };
    q.group = make_group(std::move(reps), op, q.rep.at(g->id));
    return q;
}

// --------------------------------------------------------------------------
// Invariant factors. Extracts a maximal-order cyclic subgroup (least label on
// ties), recurses on the quotient and corrects the lifted generators; primary
// components are then recombined into the divisibility chain.
// --------------------------------------------------------------------------

struct GroupStructure {
    std::vector<u64> invariant_factors;      // d_1 | d_2 | ... (ascending)
    std::vector<u64> generators;             // labels; generators[i] has order d_i
    std::vector<std::vector<u64>> coords;    // position -> exponent tuple
    bool verified_bijective = false;

    nlohmann::json to_json() const {
        return {{"invariant_factors", invariant_factors}, {"generators", generators},
                {"verified", verified_bijective}};
    }
};

namespace detail {

// Basis of an abelian p-group carrier: generators with orders, descending.
inline std::vector<std::pair<u64, u64>> p_group_basis(const GroupPtr& g, u64 p) {
    if (g->order() == 1) return {};
    u64 best_ord = 1, best = g->id;
    for (u64 x : g->elems) {
        u64 o = g->elem_order(x);
        if (o > best_ord) {
            best_ord = o;
            best = x;
        }
    }
    // Discrete log table for <a>.
    std::unordered_map<u64, u64> dlog;
    std::vector<u64> cyc;
    u64 cur = g->id;
    for (u64 e = 0; e < best_ord; ++e) {
        dlog[cur] = e;
        cyc.push_back(cur);
        cur = g->op(cur, best);
    }
    auto q = quotient_group(g, subgroup(g, cyc));
    std::vector<std::pair<u64, u64>> basis{{best, best_ord}};
    for (auto [b_bar, o] : p_group_basis(q.group, p)) {
        // Lift and correct: b^o = a^s with o | s since a has maximal order.
        u64 b = b_bar;
        u64 s = dlog.at(g->pow(b, o));
        if (s % o != 0) throw InternalCheckError("p-group basis lift: order mismatch");
        u64 corrected = g->op(b, g->pow(g->inverse(best), s / o));
        if (g->elem_order(corrected) != o)
            throw InternalCheckError("p-group basis lift: corrected order wrong");
        basis.emplace_back(corrected, o);
    }
    return basis;
}

} // namespace detail

inline GroupStructure group_structure(const GroupPtr& g, const Config& cfg = default_config()) {
    if (g->order() > cfg.group_bound)
        throw BudgetError("group structure", g->order(), cfg.group_bound);
    GroupStructure st;
    u64 n = g->order();
    if (n == 1) {
        st.verified_bijective = true;
        st.coords.push_back({});
        return st;
    }
    auto fact = factorize(n);
    // slot -> per-prime generator/orders to combine (slot 0 = largest factor)
    std::vector<std::pair<u64, u64>> combined; // generator label, order
    for (auto& [p, e] : fact) {
        u64 pe = 1;
        for (unsigned i = 0; i < e; ++i) pe *= p;
        auto gp = torsion_subgroup(g, pe);
        auto basis = detail::p_group_basis(gp, p);
        for (std::size_t i = 0; i < basis.size(); ++i) {
            if (i == combined.size()) combined.emplace_back(g->id, 1);
            combined[i].first = g->op(combined[i].first, basis[i].first);
            combined[i].second *= basis[i].second; // coprime orders multiply
        }
    }
    // combined[0] has the largest order; invariant chain ascends.
    for (auto it = combined.rbegin(); it != combined.rend(); ++it) {
        st.generators.push_back(it->first);
        st.invariant_factors.push_back(it->second);
    }

    // Explicit isomorphism with the abstract presentation: enumerate tuples.
    u64 total = 1;
    for (u64 d : st.invariant_factors) total *= d;
    if (total != n) throw InternalCheckError("invariant factors do not multiply to |G|");
    std::vector<u64> tuple(st.invariant_factors.size(), 0);
    std::vector<bool> hit(n, false);
    st.coords.assign(n, {});
    for (u64 count = 0; count < total; ++count) {
        u64 val = g->id;
        for (std::size_t i = 0; i < tuple.size(); ++i)
            val = g->op(val, g->pow(st.generators[i], tuple[i]));
        u64 p = g->pos.at(val);
        if (hit[p]) throw InternalCheckError("generator tuples are not independent");
        hit[p] = true;
        st.coords[p] = tuple;
        for (std::size_t i = tuple.size(); i-- > 0;) {
            if (++tuple[i] < st.invariant_factors[i]) break;
            tuple[i] = 0;
        }
    }
    st.verified_bijective = true;
    return st;
}

// --------------------------------------------------------------------------
// Coprime splitting: for H <= G with gcd(|H|, |G|/|H|) = 1, the complement is
// the |G|/|H|-torsion; the quotient section picks the unique complement
// member of each coset, and G = H x K elementwise.
// --------------------------------------------------------------------------

struct CoprimeSplit {
    GroupPtr complement;                     // K
    QuotientGroup quotient;                  // G/H
    GroupHom section;                        // G/H -> G, image in K
    std::vector<std::pair<u64, u64>> hk;     // position in G -> (h, k) labels
    bool verified = false;
};

inline CoprimeSplit coprime_split(const GroupPtr& g, const GroupPtr& h,
                                  const Config& cfg = default_config()) {
    u64 m = h->order();
    if (g->order() % m != 0) throw Error("coprime_split: |H| does not divide |G|");
    u64 n = g->order() / m;
    if (gcd_u64(m, n) != 1)
        throw Error("coprime_split: |H| and |G/H| are not coprime");

    CoprimeSplit cs;
    cs.complement = torsion_subgroup(g, n);
    if (cs.complement->order() != n)
        throw InternalCheckError("complement torsion subgroup has wrong order");
    for (u64 x : cs.complement->elems)
        if (h->contains(x) && x != g->id)
            throw InternalCheckError("H and K intersect nontrivially");

    cs.quotient = quotient_group(g, h);
    std::vector<u64> section_map(cs.quotient.group->order());
    for (u64 i = 0; i < cs.quotient.group->order(); ++i) {
        u64 coset = cs.quotient.group->elems[i];
        std::optional<u64> pick;
        for (u64 k : cs.complement->elems)
            if (cs.quotient.rep.at(k) == coset) {
                if (pick) throw InternalCheckError("coset has two complement representatives");
                pick = k;
            }
        if (!pick) throw InternalCheckError("coset has no complement representative");
        section_map[i] = *pick;
    }
    cs.section = make_group_hom(cs.quotient.group, g, std::move(section_map), cfg);

    cs.hk.resize(g->order());
    for (u64 i = 0; i < g->order(); ++i) {
        u64 x = g->elems[i];
        u64 k = cs.section.map[cs.quotient.group->pos.at(cs.quotient.rep.at(x))];
        u64 hh = g->op(x, g->inverse(k));
        if (!h->contains(hh)) throw InternalCheckError("H-part of x is not in H");
        cs.hk[i] = {hh, k};
    }
    // g = h*k and the pairing is bijective.
    std::unordered_map<u64, u64> seen;
    for (u64 i = 0; i < g->order(); ++i) {
        auto [hh, k] = cs.hk[i];
        if (g->op(hh, k) != g->elems[i]) throw InternalCheckError("h*k != g");
        u64 code = h->pos.at(hh) * cs.complement->order() + cs.complement->pos.at(k);
        if (seen.count(code)) throw InternalCheckError("h,k pairing not injective");
        seen[code] = i;
    }
    cs.verified = true;
    return cs;
}

// --------------------------------------------------------------------------
// Homomorphism search A -> B with A given by its invariant-factor structure.
// Candidate images of generator i are the d_i-torsion elements of B (also
// constrained to the right fiber when searching for sections of a given
// surjection). Exhaustion over the whole candidate space is recorded so that
// an empty result is a proof.
// --------------------------------------------------------------------------

struct HomSearchResult {
    std::vector<GroupHom> found;      // materialized up to `cap`
    u64 count = 0;                    // total number of matching homs
    bool exhausted = false;
    u64 scanned = 0;                  // elements inspected during filtering
    nlohmann::json per_generator;     // candidate statistics

    bool none() const { return count == 0; }
};

// When `section_of` is set, searches for sections s of it (so A must be the
// codomain of `section_of`): s with section_of(s(a)) = a for all a.
inline HomSearchResult hom_search(const GroupPtr& a, const GroupStructure& a_st,
                                  const GroupPtr& b,
                                  const std::optional<GroupHom>& section_of = std::nullopt,
                                  bool first_only = false, u64 cap = 64,
                                  const Config& cfg = default_config()) {
    if (section_of) {
        if (section_of->domain.get() != b.get() || section_of->codomain.get() != a.get())
            throw Error("hom_search: section constraint must map B onto A");
    }
    HomSearchResult res;
    res.per_generator = nlohmann::json::array();
    std::vector<std::vector<u64>> cands(a_st.generators.size());
    for (std::size_t i = 0; i < a_st.generators.size(); ++i) {
        u64 d = a_st.invariant_factors[i];
        u64 gen = a_st.generators[i];
        u64 fiber = 0;
        for (u64 x : b->elems) {
            ++res.scanned;
            bool in_fiber = !section_of || (*section_of)(x) == gen;
            if (section_of && in_fiber) ++fiber;
            if (in_fiber && b->pow(x, d) == b->id) cands[i].push_back(x);
        }
        nlohmann::json stat{{"invariant_factor", d}, {"candidates", cands[i].size()}};
        if (section_of) stat["fiber_size"] = fiber;
        res.per_generator.push_back(stat);
    }
    mpz_class total = 1;
    for (auto& c : cands) total *= c.size();
    if (total > cfg.hom_search_budget)
        throw BudgetError("hom_search", total.fits_ulong_p() ? total.get_ui() : ~u64(0),
                          cfg.hom_search_budget);
    res.count = total.get_ui();
    res.exhausted = true;
    if (res.count == 0) return res;

    // Every candidate tuple defines a hom (independent generators with the
    // order condition), so materialize tuples directly.
    u64 to_make = first_only ? 1 : std::min(res.count, cap);
    std::vector<std::size_t> idx(cands.size(), 0);
    for (u64 made = 0; made < to_make; ++made) {
        std::vector<u64> map(a->order());
        for (u64 p = 0; p < a->order(); ++p) {
            u64 val = b->id;
            for (std::size_t i = 0; i < cands.size(); ++i)
                val = b->op(val, b->pow(cands[i][idx[i]], a_st.coords[p][i]));
            map[p] = val;
        }
        res.found.push_back(make_group_hom(a, b, std::move(map), cfg));
        for (std::size_t i = cands.size(); i-- > 0;) {
            if (++idx[i] < cands[i].size()) break;
            idx[i] = 0;
        }
    }
    return res;
}

} // namespace lru
