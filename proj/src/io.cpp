#include "zhopf/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace zhopf {

namespace {

// Recursive-descent parser over a generic polynomial value V. The driver
// supplies symbol resolution and the ring operations.
template <typename V>
class ExprParser {
public:
    ExprParser(std::string text, std::function<V(const std::string&)> resolve,
               std::function<V(const Rat&)> constant,
               std::function<V(const V&, const V&)> divide)
        : text_(std::move(text)), resolve_(std::move(resolve)), constant_(std::move(constant)),
          divide_(std::move(divide)) {}

    V parse() {
        V v = expr();
        skip_ws();
        if (pos_ != text_.size()) fail("trailing input");
        return v;
    }

private:
    V expr() {
        skip_ws();
        bool neg = false;
        while (peek() == '+' || peek() == '-') {
            if (get() == '-') neg = !neg;
            skip_ws();
        }
        V acc = term();
        if (neg) acc = acc * Rat(-1);
        skip_ws();
        while (peek() == '+' || peek() == '-') {
            char op = get();
            V t = term();
            acc = (op == '+') ? acc + t : acc - t;
            skip_ws();
        }
        return acc;
    }

    V term() {
        V acc = factor();
        skip_ws();
        while (peek() == '*' || peek() == '/') {
            char op = get();
            V f = factor();
            acc = (op == '*') ? acc * f : divide_(acc, f);
            skip_ws();
        }
        return acc;
    }

    V factor() {
        V base = atom();
        skip_ws();
        if (peek() == '^') {
            get();
            skip_ws();
            bool neg = false;
            if (peek() == '-') {
                get();
                neg = true;
            }
            std::string digits = read_digits();
            if (digits.empty()) fail("exponent expected");
            int e = std::stoi(digits);
            V acc = constant_(Rat(1));
            for (int i = 0; i < e; ++i) acc = acc * base;
            if (neg) acc = divide_(constant_(Rat(1)), acc);
            return acc;
        }
        return base;
    }

    V atom() {
        skip_ws();
        char c = peek();
        if (c == '(') {
            get();
            V v = expr();
            skip_ws();
            if (get() != ')') fail("')' expected");
            return v;
        }
        if (c == '-') {
            get();
            return atom() * Rat(-1);
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string digits = read_digits();
            return constant_(parse_rat(digits));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string name;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                name += text_[pos_++];
            return resolve_(name);
        }
        fail("unexpected character");
        return constant_(Rat(0));
    }

    std::string read_digits() {
        std::string digits;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            digits += text_[pos_++];
        return digits;
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    char get() { return pos_ < text_.size() ? text_[pos_++] : '\0'; }
    [[noreturn]] void fail(const std::string& why) const {
        throw std::invalid_argument("parse error at position " + std::to_string(pos_) + ": " + why +
                                    " in '" + text_ + "'");
    }

    std::string text_;
    std::size_t pos_ = 0;
    std::function<V(const std::string&)> resolve_;
    std::function<V(const Rat&)> constant_;
    std::function<V(const V&, const V&)> divide_;
};

ParamPoly divide_param(const SymbolTable& table, const ParamPoly& a, const ParamPoly& b) {
    if (b.is_zero()) throw std::domain_error("parse: division by zero");
    if (!b.is_monomial())
        throw std::domain_error("parse: can only divide by rationals or declared-nonzero monomials");
    const auto& [e, c] = *b.terms().begin();
    ParamPoly r = a * (Rat(1) / c);
    for (std::size_t i = 0; i < e.size(); ++i)
        if (e[i] != 0) r = r.mul_symbol_pow(table, static_cast<int>(i), -e[i]);
    return r;
}

}  // namespace

ParamPoly parse_param_poly(const SymbolTable& table, const std::string& text) {
    const int A = table.size();
    ExprParser<ParamPoly> p(
        text,
        [&](const std::string& name) { return ParamPoly::symbol(A, table.require(name)); },
        [&](const Rat& c) { return ParamPoly::constant(A, c); },
        [&](const ParamPoly& a, const ParamPoly& b) { return divide_param(table, a, b); });
    return p.parse();
}

StatePoly parse_state_poly(const SymbolTable& table, const std::vector<std::string>& var_names,
                           const std::string& text) {
    const int A = table.size();
    const int nv = static_cast<int>(var_names.size());
    auto resolve = [&](const std::string& name) {
        for (int i = 0; i < nv; ++i)
            if (var_names[i] == name) return StatePoly::variable(nv, A, i);
        return StatePoly::constant(nv, ParamPoly::symbol(A, table.require(name)));
    };
    auto divide = [&](const StatePoly& a, const StatePoly& b) {
        if (b.term_count() != 1) throw std::domain_error("parse: bad divisor");
        const auto& [e, c] = *b.terms().begin();
        for (int x : e)
            if (x != 0) throw std::domain_error("parse: cannot divide by state variables");
        return a.map_coefficients([&](const ParamPoly& pc) { return divide_param(table, pc, c); });
    };
    ExprParser<StatePoly> p(
        text, resolve,
        [&](const Rat& c) { return StatePoly::constant(nv, ParamPoly::constant(A, c)); }, divide);
    return p.parse();
}

FactoredComponent factor_component(const AveragedComponent& c) {
    FactoredComponent out;
    out.mu = c.mu;
    if (c.by_pi_power.empty()) {
        out.scale = Rat(0);
        return out;
    }
    auto [pi_pow, poly] = c.single_pi_term();
    out.pi_power = pi_pow;
    Rat content = poly.content();
    out.scale = content;
    out.fbar = poly * (Rat(1) / content);
    // factor common declared-symbol powers out of the coefficients
    const int arity = out.fbar.param_arity();
    for (int sym = 0; sym < arity; ++sym) {
        bool first = true;
        int common = 0;
        for (const auto& [e, pc] : out.fbar.terms()) {
            int m = pc.min_exponent(sym);
            common = first ? m : std::min(common, m);
            first = false;
        }
        if (common != 0) {
            out.symbol_powers[sym] = common;
            StatePoly shifted(out.fbar.nvars(), arity);
            for (const auto& [e, pc] : out.fbar.terms()) {
                ExpVec shift(arity, 0);
                shift[sym] = -common;
                shifted.add_term(e, pc * ParamPoly::monomial(arity, shift, Rat(1)));
            }
            out.fbar = shifted;
        }
    }
    return out;
}

bool FactoredComponent::matches(const AveragedComponent& c) const {
    if (scale == 0) return c.is_zero();
    if (c.by_pi_power.size() != 1) return false;
    const auto& [p, poly] = *c.by_pi_power.begin();
    if (p != pi_power) return false;
    StatePoly value = fbar * scale;
    const int arity = fbar.param_arity();
    for (const auto& [sym, pow] : symbol_powers) {
        ExpVec shift(arity, 0);
        shift[sym] = pow;
        value *= StatePoly::constant(fbar.nvars(), ParamPoly::monomial(arity, shift, Rat(1)));
    }
    // compare over a common denominator R^max(mu)
    int m = std::max(mu, c.mu);
    StatePoly lhs = value.mul_var_pow(0, m - mu);
    StatePoly rhs = poly.mul_var_pow(0, m - c.mu);
    return lhs == rhs;
}

std::string FactoredComponent::scale_string(const SymbolTable& table) const {
    std::ostringstream out;
    out << rat_to_string(scale);
    if (pi_power == 1) out << "*pi";
    if (pi_power > 1) out << "*pi^" << pi_power;
    for (const auto& [sym, pow] : symbol_powers) {
        out << "*" << table.name(sym);
        if (pow != 1) out << "^" << pow;
    }
    return out.str();
}

std::string component_to_string(const AveragedComponent& c, const SymbolTable& table,
                                const std::vector<std::string>& var_names) {
    if (c.is_zero()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [p, poly] : c.by_pi_power) {
        if (!first) out << " + ";
        first = false;
        if (p > 0) out << "pi" << (p > 1 ? "^" + std::to_string(p) : "") << " * ";
        out << "(" << poly.to_string(table, var_names) << ")";
    }
    if (c.mu > 0) out << " / R^" << c.mu;
    return out.str();
}

std::vector<std::string> state_var_names(int n) {
    std::vector<std::string> v = {"R"};
    for (int s = 3; s <= n; ++s) v.push_back("X" + std::to_string(s));
    return v;
}

// ---------------------------------------------------------------------------
// system definition files

namespace {

using Json = nlohmann::ordered_json;

// splits "p[1][2,0,0][0]" into {"p", "1", "2,0,0", "0"}
std::vector<std::string> split_key(const std::string& key) {
    std::vector<std::string> parts;
    std::size_t i = 0;
    while (i < key.size() && key[i] != '[') ++i;
    parts.push_back(key.substr(0, i));
    while (i < key.size()) {
        if (key[i] != '[') throw std::invalid_argument("bad coefficient key '" + key + "'");
        std::size_t close = key.find(']', i);
        if (close == std::string::npos) throw std::invalid_argument("bad coefficient key '" + key + "'");
        parts.push_back(key.substr(i + 1, close - i - 1));
        i = close + 1;
    }
    return parts;
}

ExpVec parse_multi_index(const std::string& text, int n) {
    ExpVec idx;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) idx.push_back(std::stoi(item));
    if (static_cast<int>(idx.size()) != n)
        throw std::invalid_argument("multi-index '" + text + "' has wrong arity");
    return idx;
}

std::string multi_index_to_string(const ExpVec& idx) {
    std::string s;
    for (std::size_t i = 0; i < idx.size(); ++i) s += (i ? "," : "") + std::to_string(idx[i]);
    return s;
}

}  // namespace

std::vector<Rat> SystemFile::binding() const {
    std::vector<Rat> out(system.arity(), Rat(0));
    for (const auto& [name, v] : params) out[system.symbols().require(name)] = v;
    return out;
}

SystemFile parse_system_file(const std::string& json_text) {
    Json doc = Json::parse(json_text);
    for (const char* req : {"n", "m", "k", "b"})
        if (!doc.contains(req)) throw std::invalid_argument(std::string("system file: missing '") + req + "'");
    int n = doc.at("n").get<int>();
    int m = doc.at("m").get<int>();
    int k = doc.at("k").get<int>();

    SymbolTable table;
    if (doc.contains("symbols")) {
        for (const auto& s : doc.at("symbols")) {
            if (s.is_string()) {
                table.add(s.get<std::string>());
            } else {
                table.add(s.at("name").get<std::string>(),
                          s.value("nonzero", false));
            }
        }
    }
    std::string btext = doc.at("b").get<std::string>();
    ParamPoly freq = parse_param_poly(table, btext);

    PerturbedSystem sys(n, m, k, table, freq);
    const SymbolTable& t = sys.symbols();
    if (doc.contains("coefficients")) {
        for (const auto& [key, value] : doc.at("coefficients").items()) {
            ParamPoly coeff = parse_param_poly(t, value.get<std::string>());
            auto parts = split_key(key);
            const std::string& kind = parts.at(0);
            if (kind == "a" && parts.size() == 2) {
                sys.set_a(std::stoi(parts[1]), coeff);
            } else if (kind == "b" && parts.size() == 2) {
                sys.set_bj(std::stoi(parts[1]), coeff);
            } else if (kind == "c" && parts.size() == 3) {
                sys.set_c(std::stoi(parts[1]), std::stoi(parts[2]), coeff);
            } else if (kind == "L" && parts.size() == 4) {
                sys.add_linear(std::stoi(parts[1]), std::stoi(parts[2]), std::stoi(parts[3]), coeff);
            } else if (kind == "p" && parts.size() == 4) {
                sys.add_p(std::stoi(parts[1]), parse_multi_index(parts[2], n), std::stoi(parts[3]),
                          coeff);
            } else {
                throw std::invalid_argument("system file: unrecognized coefficient key '" + key + "'");
            }
        }
    }

    SystemFile out{std::move(sys), {}, std::nullopt};
    if (doc.contains("params"))
        for (const auto& [name, v] : doc.at("params").items())
            out.params[name] = parse_rat(v.get<std::string>());
    if (doc.contains("box")) {
        std::vector<std::pair<Rat, Rat>> box;
        for (const auto& iv : doc.at("box"))
            box.emplace_back(parse_rat(iv.at(0).get<std::string>()),
                             parse_rat(iv.at(1).get<std::string>()));
        out.box = std::move(box);
    }
    return out;
}

SystemFile load_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open system file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_system_file(ss.str());
}

std::string system_file_to_json(const PerturbedSystem& sys,
                                const std::map<std::string, Rat>& params) {
    const SymbolTable& t = sys.symbols();
    Json doc;
    doc["n"] = sys.n();
    doc["m"] = sys.m();
    doc["k"] = sys.k();
    doc["b"] = sys.frequency().to_string(t);
    Json symbols = Json::array();
    for (int i = 0; i < t.size(); ++i) {
        if (t.nonzero(i))
            symbols.push_back(Json{{"name", t.name(i)}, {"nonzero", true}});
        else
            symbols.push_back(t.name(i));
    }
    doc["symbols"] = symbols;
    Json coeffs = Json::object();
    for (int j = 1; j <= sys.k(); ++j) {
        const auto& L = sys.linear(j);
        for (int r = 0; r < sys.n(); ++r)
            for (int c = 0; c < sys.n(); ++c)
                if (!L[r][c].is_zero())
                    coeffs["L[" + std::to_string(j) + "][" + std::to_string(r) + "][" +
                           std::to_string(c) + "]"] = L[r][c].to_string(t);
    }
    for (int j = 0; j <= sys.k() - 1; ++j)
        for (const auto& [idx, rows] : sys.homogeneous(j))
            for (int s = 1; s <= sys.n(); ++s)
                if (!rows[s - 1].is_zero())
                    coeffs["p[" + std::to_string(s) + "][" + multi_index_to_string(idx) + "][" +
                           std::to_string(j) + "]"] = rows[s - 1].to_string(t);
    doc["coefficients"] = coeffs;
    if (!params.empty()) {
        Json p = Json::object();
        for (const auto& [name, v] : params) p[name] = rat_to_string(v);
        doc["params"] = p;
    }
    return doc.dump(2);
}

}  // namespace zhopf
