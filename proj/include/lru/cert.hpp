#pragma once

#include <string>

#include <json.hpp>

#include "lru/base.hpp"

namespace lru {

// Machine-checkable verdict: a witness (explicit map/isomorphism plus the
// identities that were verified) or an obstruction (exhausted search record
// or a characteristic mismatch). The payload carries the data needed to
// re-verify the verdict in isolation.
struct Certificate {
    enum class Kind { Witness, Obstruction };

    Kind kind;
    std::string statement;
    nlohmann::json payload;

    bool is_witness() const { return kind == Kind::Witness; }

    nlohmann::json to_json() const {
        return {{"kind", kind == Kind::Witness ? "witness" : "obstruction"},
                {"statement", statement},
                {"payload", payload}};
    }
};

} // namespace lru
