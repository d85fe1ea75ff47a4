#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lru {

using u64 = std::uint64_t;
using i64 = std::int64_t;

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed DSL input; carries the byte offset of the offending token.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// A requested analysis needs a local ring and the input is not one.
class NotLocalError : public Error {
public:
    NotLocalError(const std::string& what, u64 witness_a, u64 witness_b)
        : Error(what), a_(witness_a), b_(witness_b) {}
    u64 witness_a() const { return a_; }
    u64 witness_b() const { return b_; }

private:
    u64 a_, b_;
};

// The zero ring is constructible but meaningless for local analysis.
class ZeroRingError : public Error {
public:
    ZeroRingError() : Error("zero ring: local analysis is undefined on the order-1 ring") {}
};

// An enumeration would exceed its configured budget. Raised instead of
// silently truncating, so that "none found" always means exhaustion.
class BudgetError : public Error {
public:
    BudgetError(const std::string& what, u64 needed, u64 budget)
        : Error(what + ": needs " + std::to_string(needed) + " candidates, budget " +
                std::to_string(budget)),
          needed_(needed), budget_(budget) {}
    u64 needed() const { return needed_; }
    u64 budget() const { return budget_; }

private:
    u64 needed_, budget_;
};

// A verified mathematical bound was exceeded at runtime. This indicates a
// carrier bug, not a mathematical possibility.
class InternalCheckError : public Error {
public:
    explicit InternalCheckError(const std::string& what)
        : Error("internal consistency failure: " + what) {}
};

// Tunable bounds and budgets. Every exhaustive/randomized switch in the
// library reads from one of these knobs.
struct Config {
    u64 axiom_exhaustive_bound = 256;    // ring axioms: all triples up to this order
    u64 axiom_samples = 10000;           // random triples above the bound
    u64 ideal_exhaustive_bound = 4096;   // ideal closure: all pairs up to this order
    u64 hom_exhaustive_bound = 256;      // hom verification: all pairs up to this domain order
    u64 hom_samples = 10000;
    u64 scan_bound = 4096;               // exhaustive elementwise scans (uniqueness, sequences)
    u64 units_pairing_bound = 8192;      // fallback O(n^2) unit enumeration cap
    u64 materialization_bound = 1u << 20;// max order of a constructed finite carrier
    u64 table_cache_bound = 512;         // lazily materialize op tables up to this order
    u64 group_bound = 1u << 20;          // max carrier group order for structure computation
    u64 hom_search_budget = 10000000;    // generator-image tuples in hom_search
    u64 table_ring_retries = 256;        // random table-ring generation attempts
};

inline const Config& default_config() {
    static const Config cfg{};
    return cfg;
}

} // namespace lru
