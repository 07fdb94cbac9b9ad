#pragma once

#include <freealg/errors.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace freealg {

enum class VarKind { symmetric, free };
enum class VarClass { x, h, a };

inline const char* to_string(VarKind k) { return k == VarKind::symmetric ? "symmetric" : "free"; }
inline const char* to_string(VarClass c) {
    switch (c) {
        case VarClass::x: return "x";
        case VarClass::h: return "h";
        default: return "a";
    }
}

struct VariableSpec {
    std::string name;
    VarKind kind = VarKind::symmetric;
    VarClass cls = VarClass::x;

    bool operator==(const VariableSpec&) const = default;
};

class Context;
using ContextPtr = std::shared_ptr<const Context>;

// Ordered variable declarations. Indices are stable under extension, so a
// context is compatible with every context it is a prefix of.
class Context {
public:
    explicit Context(std::vector<VariableSpec> vars) : vars_(std::move(vars)) {
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (!valid_name(vars_[i].name)) throw ContextError("invalid variable name '" + vars_[i].name + "'");
            for (std::size_t j = 0; j < i; ++j)
                if (vars_[j].name == vars_[i].name) throw ContextError("duplicate variable '" + vars_[i].name + "'");
        }
    }

    static ContextPtr make(std::vector<VariableSpec> vars) {
        return std::make_shared<const Context>(std::move(vars));
    }

    static ContextPtr symmetric(const std::vector<std::string>& names, VarClass cls = VarClass::x) {
        std::vector<VariableSpec> v;
        for (auto& n : names) v.push_back({n, VarKind::symmetric, cls});
        return make(std::move(v));
    }

    static ContextPtr free(const std::vector<std::string>& names, VarClass cls = VarClass::x) {
        std::vector<VariableSpec> v;
        for (auto& n : names) v.push_back({n, VarKind::free, cls});
        return make(std::move(v));
    }

    ContextPtr extended(const std::vector<VariableSpec>& extra) const {
        auto v = vars_;
        v.insert(v.end(), extra.begin(), extra.end());
        return make(std::move(v));
    }

    std::size_t size() const { return vars_.size(); }
    const VariableSpec& operator[](std::size_t i) const { return vars_.at(i); }
    const std::vector<VariableSpec>& vars() const { return vars_; }

    std::optional<std::size_t> find(const std::string& name) const {
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i].name == name) return i;
        return std::nullopt;
    }

    std::size_t index(const std::string& name) const {
        auto i = find(name);
        if (!i) throw ContextError("undeclared variable '" + name + "'");
        return *i;
    }

    bool is_symmetric(std::size_t i) const { return vars_.at(i).kind == VarKind::symmetric; }

    std::vector<std::size_t> of_class(VarClass c) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i].cls == c) out.push_back(i);
        return out;
    }

    bool prefix_of(const Context& other) const {
        if (vars_.size() > other.vars_.size()) return false;
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (!(vars_[i] == other.vars_[i])) return false;
        return true;
    }

    static bool valid_name(const std::string& s) {
        if (s.empty() || s == "inv" || s == "T") return false;
        auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
        if (!alpha(s[0])) return false;
        for (char c : s)
            if (!alpha(c) && !(c >= '0' && c <= '9')) return false;
        return true;
    }

private:
    std::vector<VariableSpec> vars_;
};

// The larger of two compatible contexts; throws when neither extends the other.
inline ContextPtr join_contexts(const ContextPtr& a, const ContextPtr& b) {
    if (a == b) return a;
    if (!a) return b;
    if (!b) return a;
    if (a->prefix_of(*b)) return b;
    if (b->prefix_of(*a)) return a;
    throw ContextError("mismatched variable contexts");
}

}  // namespace freealg
