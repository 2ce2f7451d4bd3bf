#include "heatlab/trig.hpp"
#include "heatlab/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <cstring>

namespace heatlab {

TrigPoly TrigPoly::zero(int dim, std::array<double, 2> omega) {
    TrigPoly p;
    p.dim = dim;
    p.omega = omega;
    return p;
}

TrigPoly TrigPoly::constant(int dim, cplx c, std::array<double, 2> omega) {
    TrigPoly p = zero(dim, omega);
    if (c != cplx{}) p.coef[{0, 0}] = c;
    return p;
}

TrigPoly TrigPoly::cosine(int dim, int axis, int k, cplx c, std::array<double, 2> omega) {
    TrigPoly p = zero(dim, omega);
    std::array<int, 2> q{0, 0};
    q[axis] = k;
    p.add_harmonic(q, 0.5 * c);
    q[axis] = -k;
    p.add_harmonic(q, 0.5 * c);
    return p;
}

TrigPoly TrigPoly::sine(int dim, int axis, int k, cplx c, std::array<double, 2> omega) {
    TrigPoly p = zero(dim, omega);
    const cplx half_over_i = c * cplx(0, -0.5);
    std::array<int, 2> q{0, 0};
    q[axis] = k;
    p.add_harmonic(q, half_over_i);
    q[axis] = -k;
    p.add_harmonic(q, -half_over_i);
    return p;
}

void TrigPoly::add_harmonic(std::array<int, 2> q, cplx c) {
    if (c == cplx{}) return;
    auto [it, fresh] = coef.try_emplace(q, c);
    if (!fresh) {
        it->second += c;
        if (it->second == cplx{}) coef.erase(it);
    }
}

TrigPoly& TrigPoly::operator+=(const TrigPoly& o) {
    for (const auto& [q, c] : o.coef) add_harmonic(q, c);
    return *this;
}

TrigPoly TrigPoly::operator+(const TrigPoly& o) const {
    TrigPoly p = *this;
    p += o;
    return p;
}

TrigPoly TrigPoly::operator-(const TrigPoly& o) const {
    TrigPoly p = *this;
    for (const auto& [q, c] : o.coef) p.add_harmonic(q, -c);
    return p;
}

TrigPoly TrigPoly::operator*(const TrigPoly& o) const {
    TrigPoly p = zero(dim, omega);
    for (const auto& [q1, c1] : coef)
        for (const auto& [q2, c2] : o.coef)
            p.add_harmonic({q1[0] + q2[0], q1[1] + q2[1]}, c1 * c2);
    return p;
}

TrigPoly TrigPoly::scaled(cplx s) const {
    TrigPoly p = zero(dim, omega);
    if (s == cplx{}) return p;
    for (const auto& [q, c] : coef) p.coef[q] = s * c;
    return p;
}

TrigPoly TrigPoly::derivative(int axis) const {
    TrigPoly p = zero(dim, omega);
    for (const auto& [q, c] : coef) {
        const cplx f = cplx(0, q[axis] * omega[axis]) * c;
        if (f != cplx{}) p.coef[q] = f;
    }
    return p;
}

TrigPoly TrigPoly::conjugated() const {
    TrigPoly p = zero(dim, omega);
    for (const auto& [q, c] : coef) p.coef[{-q[0], -q[1]}] = std::conj(c);
    return p;
}

cplx TrigPoly::eval(double x, double y) const {
    cplx s{};
    for (const auto& [q, c] : coef)
        s += c * std::exp(cplx(0, q[0] * omega[0] * x + q[1] * omega[1] * y));
    return s;
}

cplx TrigPoly::constant_part() const {
    auto it = coef.find({0, 0});
    return it == coef.end() ? cplx{} : it->second;
}

bool TrigPoly::is_zero(double tol) const {
    for (const auto& [q, c] : coef)
        if (std::abs(c) > tol) return false;
    return true;
}

bool TrigPoly::is_real(double tol) const {
    for (const auto& [q, c] : coef) {
        auto it = coef.find({-q[0], -q[1]});
        const cplx mirror = it == coef.end() ? cplx{} : it->second;
        if (std::abs(mirror - std::conj(c)) > tol) return false;
    }
    return true;
}

int TrigPoly::bandwidth(int axis) const {
    int b = 0;
    for (const auto& [q, c] : coef) b = std::max(b, std::abs(q[axis]));
    return b;
}

int TrigPoly::bandwidth() const {
    int b = 0;
    for (int a = 0; a < dim; ++a) b = std::max(b, bandwidth(a));
    return b;
}

TrigPoly TrigPoly::lifted(int axis, std::array<double, 2> omega2) const {
    if (dim != 1) throw ConfigError("TrigPoly::lifted expects a 1-variable polynomial");
    TrigPoly p = zero(2, omega2);
    for (const auto& [q, c] : coef) {
        std::array<int, 2> q2{0, 0};
        q2[axis] = q[0];
        p.coef[q2] = c;
    }
    return p;
}

void TrigPoly::prune(double tol) {
    for (auto it = coef.begin(); it != coef.end();)
        it = std::abs(it->second) <= tol ? coef.erase(it) : std::next(it);
}

namespace {

struct Lexer {
    const std::string& s;
    size_t i = 0;
    explicit Lexer(const std::string& text) : s(text) {}

    void skip_ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eof() {
        skip_ws();
        return i >= s.size();
    }
    char peek() {
        skip_ws();
        return i < s.size() ? s[i] : '\0';
    }
    bool consume(char c) {
        skip_ws();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    bool consume_word(const char* w) {
        skip_ws();
        size_t n = std::strlen(w);
        if (s.compare(i, n, w) == 0) {
            i += n;
            return true;
        }
        return false;
    }
    double number() {
        skip_ws();
        size_t end = i;
        while (end < s.size() &&
               (std::isdigit(static_cast<unsigned char>(s[end])) || s[end] == '.' ||
                s[end] == 'e' || s[end] == 'E' ||
                ((s[end] == '+' || s[end] == '-') && end > i && (s[end - 1] == 'e' || s[end - 1] == 'E'))))
            ++end;
        if (end == i) throw ConfigError("expression: expected a number at '" + s.substr(i) + "'");
        double v = std::strtod(s.substr(i, end - i).c_str(), nullptr);
        i = end;
        return v;
    }
};

} // namespace

TrigPoly parse_trig(const std::string& text, int dim, std::array<double, 2> omega) {
    TrigPoly out = TrigPoly::zero(dim, omega);
    Lexer lx(text);
    if (lx.eof()) return out;

    bool first = true;
    while (!lx.eof()) {
        double sign = 1.0;
        if (lx.consume('+')) {
        } else if (lx.consume('-')) {
            sign = -1.0;
        } else if (!first) {
            throw ConfigError("expression: expected '+' or '-' at '" + text.substr(lx.i) + "'");
        }
        first = false;

        cplx coef(sign, 0);
        bool have_coef = false;
        char c = lx.peek();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            coef *= lx.number();
            have_coef = true;
            if (lx.consume('i')) coef *= cplx(0, 1);
        } else if (c == 'i' && (lx.i + 1 >= lx.s.size() || lx.s[lx.i + 1] != 'n')) {
            // bare imaginary unit; 'in' would be the start of nothing valid anyway
            lx.consume('i');
            coef *= cplx(0, 1);
            have_coef = true;
        }

        bool expect_func = false;
        if (have_coef) {
            if (lx.consume('*')) expect_func = true;
        } else {
            expect_func = true;
        }

        if (!expect_func) {
            out += TrigPoly::constant(dim, coef, omega);
            continue;
        }

        bool is_sin;
        if (lx.consume_word("sin"))
            is_sin = true;
        else if (lx.consume_word("cos"))
            is_sin = false;
        else if (have_coef) {
            // "2 * i" style products of constants
            if (lx.consume('i')) {
                out += TrigPoly::constant(dim, coef * cplx(0, 1), omega);
                continue;
            }
            throw ConfigError("expression: expected sin/cos at '" + text.substr(lx.i) + "'");
        } else {
            throw ConfigError("expression: expected a term at '" + text.substr(lx.i) + "'");
        }

        if (!lx.consume('(')) throw ConfigError("expression: expected '(' after sin/cos");
        int k = 1;
        char p = lx.peek();
        if (std::isdigit(static_cast<unsigned char>(p))) {
            k = static_cast<int>(lx.number());
            if (!lx.consume('*')) throw ConfigError("expression: expected '*' after harmonic index");
        }
        int axis;
        if (lx.consume('x'))
            axis = 0;
        else if (lx.consume('y'))
            axis = 1;
        else
            throw ConfigError("expression: expected variable x or y");
        if (axis >= dim) throw ConfigError("expression: variable out of range for this chart");
        if (!lx.consume(')')) throw ConfigError("expression: expected ')'");

        out += is_sin ? TrigPoly::sine(dim, axis, k, coef, omega)
                      : TrigPoly::cosine(dim, axis, k, coef, omega);
    }
    return out;
}

} // namespace heatlab
