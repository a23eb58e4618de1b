#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>

namespace clonal::expr {

// Resolves a variable name to its value. Implementations should throw
// clonal::ExprError for unknown names.
using Lookup = std::function<double(const std::string&)>;

// A parsed arithmetic/boolean expression over named variables.
//
// Grammar (usual precedence, lowest first):
//   or    := and ('||' and)*
//   and   := cmp ('&&' cmp)*
//   cmp   := add (('<'|'>'|'<='|'>='|'=='|'!=') add)?
//   add   := mul (('+'|'-') mul)*
//   mul   := unary (('*'|'/') unary)*
//   unary := ('-'|'!') unary | primary
//   primary := number | name | name '(' args ')' | '(' or ')'
//
// Built-in functions: abs(x), min(x, y), max(x, y), log(x), exp(x), sqrt(x).
// Boolean results are encoded as 1.0 / 0.0; '&&', '||' and '!' treat any
// non-zero value as true. Comparisons involving NaN evaluate to false.
class Expression {
 public:
    Expression() = default;

    // Parses text into an expression tree; throws ExprError on bad syntax.
    static Expression parse(const std::string& text);

    // Evaluates against the given variable resolver.
    double evaluate(const Lookup& lookup) const;

    bool truthy(const Lookup& lookup) const { return evaluate(lookup) != 0.0; }

    bool empty() const { return root_ == nullptr; }
    const std::string& text() const { return text_; }

    struct Node;  // exposed for the implementation; not part of the API

 private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

using Environment = std::map<std::string, double, std::less<>>;

// Lookup over a fixed map; unknown names throw ExprError.
Lookup lookup_in(const Environment& env);

// One-shot convenience: parse and evaluate against env.
double evaluate(const std::string& text, const Environment& env);

}  // namespace clonal::expr
