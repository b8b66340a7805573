#pragma once

#include "heightlab/arith.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace hl {

using json = nlohmann::ordered_json;

// holds: inequality verified; inconclusive: violated only inside the error bar;
// failed: violated beyond the error bar.
enum class Verdict { holds, inconclusive, failed };
std::string to_string(Verdict v);

struct CheckRecord {
    std::string check;
    json instance = json::object();
    std::string lhs, rhs;
    std::string margin;  // rhs - lhs
    std::string error_bar = "0";
    Verdict verdict = Verdict::holds;
    json detail = json::object();

    json to_json() const;
    bool ok() const { return verdict != Verdict::failed; }
};

// lhs <= rhs, exact.
CheckRecord le_exact(std::string check, const Rational& lhs, const Rational& rhs);
// lhs <= rhs where each side is known to within err (absolute).
CheckRecord le_real(std::string check, const Real& lhs, const Real& rhs, const Real& err);
// lhs <= rhs for exact log-linear forms; evaluated at working precision with a tiny tolerance.
CheckRecord le_log(std::string check, const LogForm& lhs, const LogForm& rhs);
// Boolean predicate (exact identities).
CheckRecord predicate(std::string check, bool ok, json detail = json::object());

struct Tally {
    long holds = 0, inconclusive = 0, failed = 0;
    void add(const CheckRecord& r);
    void add(const std::vector<CheckRecord>& rs) {
        for (const auto& r : rs) add(r);
    }
    long total() const { return holds + inconclusive + failed; }
    json to_json() const;
};

}  // namespace hl
