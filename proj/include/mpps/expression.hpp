#pragma once

#include <memory>
#include <string>

namespace mpps::expr {

// A parsed scalar expression in the single variable t.  Grammar:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | 't' | 'pi' | ('sin'|'cos'|'exp') '(' expr ')' | '(' expr ')'
//
// Parse errors carry the character position and the offending slice, so a
// broken config entry is reported precisely.  Instances are cheap to copy
// (the tree is shared) and evaluation is allocation-free.
class Expression {
public:
    Expression() = default;

    static Expression parse(const std::string& source);

    double operator()(double t) const;
    bool valid() const { return static_cast<bool>(root_); }
    const std::string& source() const { return src_; }

    struct Node;

private:
    std::shared_ptr<const Node> root_;
    std::string src_;
};

} // namespace mpps::expr
