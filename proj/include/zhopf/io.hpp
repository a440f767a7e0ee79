#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zhopf/averaging.hpp"
#include "zhopf/statepoly.hpp"

namespace zhopf {

// Parses "+,-,*,/,^,()" expressions over integers and named symbols into the
// parameter ring. Division is exact: by rationals or by invertible
// (declared-nonzero) monomials only.
ParamPoly parse_param_poly(const SymbolTable& table, const std::string& text);

// Same grammar; identifiers resolve to state variable names first, then to
// parameter symbols. Division by state variables is rejected.
StatePoly parse_state_poly(const SymbolTable& table, const std::vector<std::string>& var_names,
                           const std::string& text);

// Canonical presentation of one averaged component: a positive-leading
// pi-power scale times common declared-symbol powers times a content-free
// polynomial over R^mu.
struct FactoredComponent {
    Rat scale;        // rational scale factor
    int pi_power = 0;
    int mu = 0;
    std::map<int, int> symbol_powers;  // symbol index -> common power factored out
    StatePoly fbar;   // content-free, grlex-leading coefficient positive

    bool matches(const AveragedComponent& c) const;
    std::string scale_string(const SymbolTable& table) const;
};

FactoredComponent factor_component(const AveragedComponent& c);

std::string component_to_string(const AveragedComponent& c, const SymbolTable& table,
                                const std::vector<std::string>& var_names);

std::vector<std::string> state_var_names(int n);

// ---------------------------------------------------------------------------
// system definition files
//
// JSON document with fields n, m, k, b, symbols, coefficients, and optional
// params / box. Coefficient keys: a[j], b[j], c[s][j], L[j][row][col],
// p[s][i1,...,in][j]; values are expression strings over the declared
// symbols.
struct SystemFile {
    PerturbedSystem system;
    std::map<std::string, Rat> params;
    std::optional<std::vector<std::pair<Rat, Rat>>> box;

    std::vector<Rat> binding() const;  // params resolved against the symbol table
};

SystemFile parse_system_file(const std::string& json_text);
SystemFile load_system_file(const std::string& path);

// Canonical JSON text of a system (round-trips through parse_system_file).
std::string system_file_to_json(const PerturbedSystem& sys,
                                const std::map<std::string, Rat>& params = {});

}  // namespace zhopf
