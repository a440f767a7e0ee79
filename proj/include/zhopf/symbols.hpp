#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace zhopf {

// Named parameter symbols shared by all polynomials of one problem instance.
// Symbols declared nonzero may carry negative exponents (exact division by
// them stays inside the ring).
class SymbolTable {
public:
    int add(const std::string& name, bool nonzero = false) {
        for (const auto& n : names_)
            if (n == name) throw std::invalid_argument("SymbolTable: duplicate symbol '" + name + "'");
        names_.push_back(name);
        nonzero_.push_back(nonzero);
        return static_cast<int>(names_.size()) - 1;
    }

    int index_of(const std::string& name) const {
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == name) return static_cast<int>(i);
        return -1;
    }

    int require(const std::string& name) const {
        int i = index_of(name);
        if (i < 0) throw std::invalid_argument("SymbolTable: unknown symbol '" + name + "'");
        return i;
    }

    int size() const { return static_cast<int>(names_.size()); }
    const std::string& name(int i) const { return names_.at(i); }
    bool nonzero(int i) const { return nonzero_.at(i); }
    const std::vector<std::string>& names() const { return names_; }

private:
    std::vector<std::string> names_;
    std::vector<bool> nonzero_;
};

}  // namespace zhopf
