#include "heightlab/certify.hpp"

namespace hl {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::inconclusive: return "inconclusive";
        case Verdict::failed: return "FAILED";
    }
    return "?";
}

json CheckRecord::to_json() const {
    json j;
    j["check"] = check;
    if (!instance.empty()) j["instance"] = instance;
    j["lhs"] = lhs;
    j["rhs"] = rhs;
    j["margin"] = margin;
    j["error_bar"] = error_bar;
    j["verdict"] = hl::to_string(verdict);
    if (!detail.empty()) j["detail"] = detail;
    return j;
}

CheckRecord le_exact(std::string check, const Rational& lhs, const Rational& rhs) {
    CheckRecord r;
    r.check = std::move(check);
    r.lhs = to_string(lhs);
    r.rhs = to_string(rhs);
    r.margin = to_string(Rational(rhs - lhs));
    r.verdict = lhs <= rhs ? Verdict::holds : Verdict::failed;
    return r;
}

CheckRecord le_real(std::string check, const Real& lhs, const Real& rhs, const Real& err) {
    CheckRecord r;
    r.check = std::move(check);
    r.lhs = real_to_string(lhs);
    r.rhs = real_to_string(rhs);
    Real margin = rhs - lhs;
    r.margin = real_to_string(margin);
    r.error_bar = real_to_string(err, 6);
    if (margin >= err)
        r.verdict = Verdict::holds;
    else if (margin >= -err)
        r.verdict = Verdict::inconclusive;
    else
        r.verdict = Verdict::failed;
    return r;
}

CheckRecord le_log(std::string check, const LogForm& lhs, const LogForm& rhs) {
    LogForm diff = rhs - lhs;
    CheckRecord r;
    r.check = std::move(check);
    r.lhs = real_to_string(lhs.value());
    r.rhs = real_to_string(rhs.value());
    if (diff.is_zero()) {
        r.margin = "0";
        r.verdict = Verdict::holds;
        return r;
    }
    Real m = diff.value();
    // Evaluation error of a log form at the working precision.
    Real tol = pow(Real(2), -static_cast<int>(precision_bits()) + 16);
    r.margin = real_to_string(m);
    r.error_bar = real_to_string(tol, 6);
    r.detail["margin_form"] = diff.to_string();
    if (m > tol)
        r.verdict = Verdict::holds;
    else if (m >= -tol)
        r.verdict = Verdict::inconclusive;
    else
        r.verdict = Verdict::failed;
    return r;
}

CheckRecord predicate(std::string check, bool ok, json detail) {
    CheckRecord r;
    r.check = std::move(check);
    r.lhs = ok ? "true" : "false";
    r.rhs = "true";
    r.margin = ok ? "0" : "-1";
    r.verdict = ok ? Verdict::holds : Verdict::failed;
    r.detail = std::move(detail);
    return r;
}

void Tally::add(const CheckRecord& r) {
    switch (r.verdict) {
        case Verdict::holds: ++holds; break;
        case Verdict::inconclusive: ++inconclusive; break;
        case Verdict::failed: ++failed; break;
    }
}

json Tally::to_json() const {
    return json{{"holds", holds}, {"inconclusive", inconclusive}, {"FAILED", failed}, {"total", total()}};
}

}  // namespace hl
