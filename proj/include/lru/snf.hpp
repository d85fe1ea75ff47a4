#pragma once

#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "lru/base.hpp"
#include "lru/cert.hpp"
#include "lru/numutil.hpp"

namespace lru {

struct IntMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<mpz_class> a;

    IntMatrix() = default;
    IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0) {}

    static IntMatrix identity(std::size_t n) {
        IntMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    mpz_class& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    const mpz_class& at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    bool operator==(const IntMatrix& o) const {
        return rows == o.rows && cols == o.cols && a == o.a;
    }

    IntMatrix operator*(const IntMatrix& o) const {
        if (cols != o.rows) throw Error("matrix product: shape mismatch");
        IntMatrix r(rows, o.cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t k = 0; k < cols; ++k) {
                if (at(i, k) == 0) continue;
                for (std::size_t j = 0; j < o.cols; ++j)
                    r.at(i, j) += at(i, k) * o.at(k, j);
            }
        return r;
    }

    IntMatrix transpose() const {
        IntMatrix t(cols, rows);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) t.at(j, i) = at(i, j);
        return t;
    }

    nlohmann::json to_json() const {
        nlohmann::json out = nlohmann::json::array();
        for (std::size_t i = 0; i < rows; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (std::size_t j = 0; j < cols; ++j) row.push_back(at(i, j).get_str());
            out.push_back(row);
        }
        return out;
    }

    static IntMatrix from_json(const nlohmann::json& j) {
        if (!j.is_array() || j.empty()) throw Error("matrix: expected a non-empty array of rows");
        IntMatrix m(j.size(), j.at(0).size());
        for (std::size_t i = 0; i < m.rows; ++i) {
            if (j.at(i).size() != m.cols) throw Error("matrix: ragged rows");
            for (std::size_t k = 0; k < m.cols; ++k) {
                const auto& cell = j.at(i).at(k);
                m.at(i, k) = cell.is_string() ? mpz_class(cell.get<std::string>())
                                              : mpz_class(cell.get<long>());
            }
        }
        return m;
    }
};

// Fraction-free (Bareiss) determinant; used to confirm unimodularity.
inline mpz_class determinant(IntMatrix m) {
    if (m.rows != m.cols) throw Error("determinant: square matrix required");
    std::size_t n = m.rows;
    mpz_class sign = 1, prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m.at(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && m.at(p, k) == 0) ++p;
            if (p == n) return 0;
            for (std::size_t j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(p, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                mpz_class t = m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j);
                mpz_divexact(m.at(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
        prev = m.at(k, k);
    }
    return sign * m.at(n - 1, n - 1);
}

struct SNFResult {
    IntMatrix d, u, v; // u * a * v = d, with u and v unimodular
};

// Diagonalization by unimodular row/column operations. Pivot selection:
// smallest nonzero absolute value in the working submatrix, row-major on
// ties. Diagonal entries are nonnegative and divide in sequence.
inline SNFResult smith_normal_form(const IntMatrix& input) {
    IntMatrix s = input;
    std::size_t m = s.rows, n = s.cols;
    IntMatrix u = IntMatrix::identity(m), v = IntMatrix::identity(n);

    auto swap_rows = [&](std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t c = 0; c < n; ++c) std::swap(s.at(i, c), s.at(j, c));
        for (std::size_t c = 0; c < m; ++c) std::swap(u.at(i, c), u.at(j, c));
    };
    auto swap_cols = [&](std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t r = 0; r < m; ++r) std::swap(s.at(r, i), s.at(r, j));
        for (std::size_t r = 0; r < n; ++r) std::swap(v.at(r, i), v.at(r, j));
    };
    auto add_row = [&](std::size_t dst, std::size_t src, const mpz_class& f) {
        for (std::size_t c = 0; c < n; ++c) s.at(dst, c) += f * s.at(src, c);
        for (std::size_t c = 0; c < m; ++c) u.at(dst, c) += f * u.at(src, c);
    };
    auto add_col = [&](std::size_t dst, std::size_t src, const mpz_class& f) {
        for (std::size_t r = 0; r < m; ++r) s.at(r, dst) += f * s.at(r, src);
        for (std::size_t r = 0; r < n; ++r) v.at(r, dst) += f * v.at(r, src);
    };

    std::size_t rank_limit = std::min(m, n);
    for (std::size_t step = 0; step < rank_limit; ++step) {
        for (;;) {
            // Smallest nonzero |entry| in the submatrix, row-major tie-break.
            bool found = false;
            std::size_t pi = step, pj = step;
            mpz_class best;
            for (std::size_t i = step; i < m; ++i)
                for (std::size_t j = step; j < n; ++j) {
                    if (s.at(i, j) == 0) continue;
                    mpz_class v_abs = abs(s.at(i, j));
                    if (!found || v_abs < best) {
                        found = true;
                        best = v_abs;
                        pi = i;
                        pj = j;
                    }
                }
            if (!found) {
                step = rank_limit; // remaining block is zero
                break;
            }
            swap_rows(step, pi);
            swap_cols(step, pj);

            bool dirty = false;
            for (std::size_t i = step + 1; i < m; ++i) {
                if (s.at(i, step) == 0) continue;
                mpz_class q;
                mpz_tdiv_q(q.get_mpz_t(), s.at(i, step).get_mpz_t(), s.at(step, step).get_mpz_t());
                add_row(i, step, -q);
                if (s.at(i, step) != 0) dirty = true;
            }
            for (std::size_t j = step + 1; j < n; ++j) {
                if (s.at(step, j) == 0) continue;
                mpz_class q;
                mpz_tdiv_q(q.get_mpz_t(), s.at(step, j).get_mpz_t(), s.at(step, step).get_mpz_t());
                add_col(j, step, -q);
                if (s.at(step, j) != 0) dirty = true;
            }
            if (dirty) continue; // smaller remainders exist, re-pick pivot

            // Pivot must divide every remaining entry.
            bool fixed = false;
            for (std::size_t i = step + 1; i < m && !fixed; ++i)
                for (std::size_t j = step + 1; j < n && !fixed; ++j)
                    if (s.at(i, j) % s.at(step, step) != 0) {
                        add_row(step, i, 1);
                        fixed = true;
                    }
            if (!fixed) break;
        }
        if (step >= rank_limit) break;
        if (s.at(step, step) < 0) {
            for (std::size_t c = 0; c < n; ++c) s.at(step, c) = -s.at(step, c);
            for (std::size_t c = 0; c < m; ++c) u.at(step, c) = -u.at(step, c);
        }
    }

    SNFResult res{std::move(s), std::move(u), std::move(v)};
    if (!(res.u * input * res.v == res.d))
        throw InternalCheckError("smith normal form: U*A*V != D");
    for (std::size_t i = 0; i + 1 < rank_limit; ++i) {
        const mpz_class &di = res.d.at(i, i), &dj = res.d.at(i + 1, i + 1);
        if (dj != 0 && (di == 0 || dj % di != 0))
            throw InternalCheckError("smith normal form: divisibility chain broken");
    }
    return res;
}

// --------------------------------------------------------------------------
// Ext^1 over the integers for finitely generated abelian groups, computed two
// independent ways: through a free presentation diagonalized by SNF, and by
// the gcd closed form. The two must agree.
// --------------------------------------------------------------------------

// Invariant factors (each >= 2) plus free rank.
struct AbPres {
    std::vector<u64> torsion;
    u64 free_rank = 0;

    static AbPres of(std::vector<u64> torsion, u64 free_rank = 0) {
        for (u64 d : torsion)
            if (d < 2) throw Error("presentation: torsion factors must be >= 2");
        return AbPres{std::move(torsion), free_rank};
    }

    std::string display() const {
        std::string out;
        for (u64 d : torsion) out += (out.empty() ? "" : " x ") + ("Z/" + std::to_string(d));
        for (u64 i = 0; i < free_rank; ++i) out += (out.empty() ? "Z" : " x Z");
        return out.empty() ? "0" : out;
    }
};

// Invariant factors of the cokernel of an integer matrix (columns are
// relations among the rows' worth of generators).
inline std::vector<u64> cokernel_invariants(const IntMatrix& rel) {
    SNFResult snf = smith_normal_form(rel);
    std::size_t rank = 0;
    std::vector<u64> inv;
    for (std::size_t i = 0; i < std::min(rel.rows, rel.cols); ++i) {
        const mpz_class& d = snf.d.at(i, i);
        if (d != 0) {
            ++rank;
            if (d > 1) {
                if (!d.fits_ulong_p()) throw Error("cokernel invariant factor overflows u64");
                inv.push_back(d.get_ui());
            }
        }
    }
    if (rank < rel.rows) throw Error("cokernel has free part");
    return inv;
}

// SNF route: Ext^1(A, B) = B^r / P^T(B^m) presented by generators and
// relations over Z, diagonalized by smith_normal_form.
inline std::vector<u64> ext1_snf_route(const AbPres& a, const AbPres& b) {
    std::size_t r = a.torsion.size();
    if (r == 0) return {};
    std::size_t m = r + a.free_rank;
    std::size_t s = b.torsion.size() + b.free_rank;
    std::size_t rows = s * r;                         // generators of B^r
    std::size_t cols = r * b.torsion.size() + s * m;  // B-relations + image of P^T
    IntMatrix rel(rows, cols);
    std::size_t c = 0;
    for (std::size_t l = 0; l < r; ++l)
        for (std::size_t t = 0; t < b.torsion.size(); ++t) {
            rel.at(l * s + t, c) = b.torsion[t];
            ++c;
        }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < s; ++j) {
            if (i < r) rel.at(i * s + j, c) = a.torsion[i]; // P[i][l] = a_i delta_{il}
            ++c;
        }
    return cokernel_invariants(rel);
}

// Closed form: Ext^1(Z/a, Z/b) = Z/gcd(a,b); Ext^1(Z/a, Z) = Z/a; free A
// contributes nothing.
inline std::vector<u64> ext1_closed_form(const AbPres& a, const AbPres& b) {
    std::vector<u64> cyclic;
    for (u64 ai : a.torsion) {
        for (u64 bj : b.torsion) cyclic.push_back(gcd_u64(ai, bj));
        for (u64 g = 0; g < b.free_rank; ++g) cyclic.push_back(ai);
    }
    return invariant_factors_from_cyclic(cyclic);
}

inline std::vector<u64> ext1(const AbPres& a, const AbPres& b) {
    auto snf_route = ext1_snf_route(a, b);
    auto closed = ext1_closed_form(a, b);
    if (snf_route != closed)
        throw InternalCheckError("Ext^1 routes disagree: SNF vs closed form");
    return snf_route;
}

inline std::string display_invariants(const std::vector<u64>& inv) {
    if (inv.empty()) return "0";
    std::string out;
    for (u64 d : inv) out += (out.empty() ? "" : " x ") + ("Z/" + std::to_string(d));
    return out;
}

// --------------------------------------------------------------------------
// Vanishing criterion: if r is regular on A (coprime to all torsion of A)
// and r annihilates B, then Ext^1(A, B) = 0. The hypotheses are verified
// first; when they fail the check is skipped and reported as inapplicable.
// --------------------------------------------------------------------------

struct VanishingCheck {
    bool r_regular_on_a = false;
    bool r_annihilates_b = false;
    bool applicable = false;
    std::vector<u64> ext;
    Certificate certificate{Certificate::Kind::Obstruction, "", {}};
};

inline VanishingCheck corollary_vanishing_check(const AbPres& a, const AbPres& b, u64 r) {
    if (r < 2) throw Error("vanishing check: r >= 2 required");
    VanishingCheck out;
    out.r_regular_on_a = true;
    for (u64 ai : a.torsion)
        if (gcd_u64(r, ai) != 1) out.r_regular_on_a = false;
    out.r_annihilates_b = b.free_rank == 0;
    for (u64 bj : b.torsion)
        if (r % bj != 0) out.r_annihilates_b = false;
    out.applicable = out.r_regular_on_a && out.r_annihilates_b;

    nlohmann::json payload{{"A", a.display()},
                           {"B", b.display()},
                           {"r", r},
                           {"r_regular_on_A", out.r_regular_on_a},
                           {"r_annihilates_B", out.r_annihilates_b}};
    if (!out.applicable) {
        out.certificate = Certificate{Certificate::Kind::Obstruction,
                                      "hypotheses not satisfied; no vanishing claim", payload};
        return out;
    }
    out.ext = ext1(a, b);
    if (!out.ext.empty())
        throw InternalCheckError("Ext^1 vanishing violated with hypotheses satisfied");
    payload["ext1"] = "0";
    out.certificate =
        Certificate{Certificate::Kind::Witness, "Ext^1(A,B) = 0 (both routes)", payload};
    return out;
}

} // namespace lru
