#include "heightlab/json_io.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace hl {

json poly_to_json(const Poly& P) {
    json j;
    j["vars"] = P.vars();
    json terms = json::array();
    for (const auto& [m, c] : P.terms()) {
        json e = json::array();
        for (int k = 0; k < P.nvars(); ++k) e.push_back(static_cast<int>(m.e[k]));
        terms.push_back(json{{"exp", e}, {"coef", to_string(c)}});
    }
    j["terms"] = terms;
    return j;
}

Rational rational_from_json(const json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long>());
    throw std::invalid_argument("rational must be a string \"p/q\" or an integer");
}

Poly poly_from_json(const json& j) {
    if (!j.is_object() || !j.contains("vars") || !j.contains("terms"))
        throw std::invalid_argument("polynomial JSON needs \"vars\" and \"terms\"");
    auto vars = j.at("vars").get<std::vector<std::string>>();
    std::vector<Poly::Term> terms;
    for (const auto& t : j.at("terms")) {
        auto e = t.at("exp").get<std::vector<int>>();
        if (e.size() != vars.size()) throw std::invalid_argument("exponent array length differs from vars");
        terms.emplace_back(Mono::from(e), rational_from_json(t.at("coef")));
    }
    return Poly::from_terms(vars, std::move(terms));
}

namespace {

// Recursive descent over  expr := term (('+'|'-') term)*,  term := factor ('*' factor)*,
// factor := ('-' factor) | atom ('^' int)?,  atom := rational | name | '(' expr ')'.
class InfixParser {
public:
    InfixParser(const std::string& s, std::vector<std::string> vars) : s_(s), vars_(std::move(vars)) {}

    Poly run() {
        Poly P = expr();
        skip();
        if (i_ != s_.size()) fail("unexpected character");
        return P;
    }

private:
    const std::string& s_;
    std::vector<std::string> vars_;
    std::size_t i_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("polynomial text: " + what + " at offset " + std::to_string(i_));
    }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) return ++i_, true;
        return false;
    }
    Poly expr() {
        Poly P = term();
        for (;;) {
            if (eat('+')) P += term();
            else if (eat('-')) P -= term();
            else return P;
        }
    }
    Poly term() {
        Poly P = factor();
        while (eat('*')) P *= factor();
        return P;
    }
    Poly factor() {
        if (eat('-')) return -factor();
        Poly P = atom();
        if (eat('^')) {
            skip();
            std::size_t j = i_;
            while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
            if (j == i_) fail("expected exponent");
            P = P.pow(static_cast<unsigned>(std::stoul(s_.substr(j, i_ - j))));
        }
        return P;
    }
    Poly atom() {
        skip();
        if (eat('(')) {
            Poly P = expr();
            if (!eat(')')) fail("expected ')'");
            return P;
        }
        if (i_ >= s_.size()) fail("unexpected end");
        const char c = s_[i_];
        std::size_t j = i_;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (i_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '/')) ++i_;
            return Poly::constant(vars_, parse_rational(s_.substr(j, i_ - j)));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
            const std::string name = s_.substr(j, i_ - j);
            auto it = std::find(vars_.begin(), vars_.end(), name);
            if (it == vars_.end()) fail("unknown variable " + name);
            return Poly::variable(vars_, static_cast<int>(it - vars_.begin()));
        }
        fail("unexpected character");
    }
};

// Names in order of first appearance.
std::vector<std::string> scan_names(const std::string& s) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < s.size();) {
        const unsigned char c = static_cast<unsigned char>(s[i]);
        if (std::isdigit(c)) {
            while (i < s.size() && std::isalnum(static_cast<unsigned char>(s[i]))) ++i;
        } else if (std::isalpha(c) || c == '_') {
            std::size_t j = i;
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
            std::string name = s.substr(j, i - j);
            if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
        } else {
            ++i;
        }
    }
    return out;
}

}  // namespace

Poly parse_poly_text(const std::string& text, std::vector<std::string> vars) {
    if (vars.empty()) vars = scan_names(text);
    if (vars.size() > static_cast<std::size_t>(kMaxVars)) throw std::invalid_argument("too many variables");
    return InfixParser(text, std::move(vars)).run();
}

Poly parse_poly(const std::string& text, const std::vector<std::string>& vars) {
    auto k = text.find_first_not_of(" \t\r\n");
    if (k != std::string::npos && text[k] == '{') return poly_from_json(json::parse(text));
    return parse_poly_text(text, vars);
}

json rationals_to_json(const std::vector<Rational>& xs) {
    json a = json::array();
    for (const auto& x : xs) a.push_back(to_string(x));
    return a;
}

std::vector<Rational> rationals_from_json(const json& j) {
    std::vector<Rational> out;
    for (const auto& x : j) out.push_back(rational_from_json(x));
    return out;
}

json index_to_json(const MultiIndex& I) { return json(I); }

MultiIndex index_from_json(const json& j) { return j.get<MultiIndex>(); }

}  // namespace hl
