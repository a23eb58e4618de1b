#include <clonal/expr.hpp>

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include <clonal/errors.hpp>

namespace clonal::expr {

struct Expression::Node {
    enum class Kind { Number, Variable, Unary, Binary, Call };
    Kind kind = Kind::Number;
    double number = 0.0;
    std::string name;  // Variable and Call
    // Unary ops: '-', '!'. Binary ops: '+', '-', '*', '/', '<', '>',
    // 'l' (<=), 'g' (>=), 'e' (==), 'n' (!=), '&' (&&), '|' (||).
    char op = 0;
    std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

struct Token {
    enum class Kind { Number, Name, Op, End };
    Kind kind = Kind::End;
    double number = 0.0;
    std::string name;
    char op = 0;  // same encoding as Node::op, plus '(', ')', ',', '!'
};

class Lexer {
 public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

 private:
    void advance() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ >= text_.size()) {
            current_ = Token{};
            return;
        }
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && pos_ + 1 < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
            const char* start = text_.c_str() + pos_;
            char* end = nullptr;
            const double value = std::strtod(start, &end);
            if (end == start) throw ExprError("malformed number in expression at offset " + std::to_string(pos_));
            pos_ += static_cast<std::size_t>(end - start);
            current_ = Token{Token::Kind::Number, value, "", 0};
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
                ++end;
            current_ = Token{Token::Kind::Name, 0.0, text_.substr(pos_, end - pos_), 0};
            pos_ = end;
            return;
        }
        auto two = [&](char a, char b) {
            return c == a && pos_ + 1 < text_.size() && text_[pos_ + 1] == b;
        };
        char op = 0;
        std::size_t len = 1;
        if (two('&', '&')) { op = '&'; len = 2; }
        else if (two('|', '|')) { op = '|'; len = 2; }
        else if (two('<', '=')) { op = 'l'; len = 2; }
        else if (two('>', '=')) { op = 'g'; len = 2; }
        else if (two('=', '=')) { op = 'e'; len = 2; }
        else if (two('!', '=')) { op = 'n'; len = 2; }
        else if (c == '+' || c == '-' || c == '*' || c == '/' || c == '<' || c == '>' ||
                 c == '(' || c == ')' || c == ',' || c == '!') { op = c; }
        else throw ExprError(std::string("unexpected character '") + c + "' in expression at offset " + std::to_string(pos_));
        pos_ += len;
        current_ = Token{Token::Kind::Op, 0.0, "", op};
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    Token current_;
};

class Parser {
 public:
    explicit Parser(const std::string& text) : lx_(text) {}

    NodePtr parse() {
        NodePtr e = parse_or();
        if (lx_.peek().kind != Token::Kind::End) throw ExprError("trailing tokens after expression");
        return e;
    }

 private:
    bool eat_op(char op) {
        if (lx_.peek().kind == Token::Kind::Op && lx_.peek().op == op) {
            lx_.take();
            return true;
        }
        return false;
    }

    static NodePtr make_binary(char op, NodePtr lhs, NodePtr rhs) {
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::Binary;
        n->op = op;
        n->args = {std::move(lhs), std::move(rhs)};
        return n;
    }

    NodePtr parse_or() {
        NodePtr lhs = parse_and();
        while (eat_op('|')) lhs = make_binary('|', lhs, parse_and());
        return lhs;
    }

    NodePtr parse_and() {
        NodePtr lhs = parse_cmp();
        while (eat_op('&')) lhs = make_binary('&', lhs, parse_cmp());
        return lhs;
    }

    NodePtr parse_cmp() {
        NodePtr lhs = parse_add();
        for (char op : {'<', '>', 'l', 'g', 'e', 'n'}) {
            if (eat_op(op)) return make_binary(op, lhs, parse_add());
        }
        return lhs;
    }

    NodePtr parse_add() {
        NodePtr lhs = parse_mul();
        for (;;) {
            if (eat_op('+')) lhs = make_binary('+', lhs, parse_mul());
            else if (eat_op('-')) lhs = make_binary('-', lhs, parse_mul());
            else return lhs;
        }
    }

    NodePtr parse_mul() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (eat_op('*')) lhs = make_binary('*', lhs, parse_unary());
            else if (eat_op('/')) lhs = make_binary('/', lhs, parse_unary());
            else return lhs;
        }
    }

    NodePtr parse_unary() {
        for (char op : {'-', '!'}) {
            if (eat_op(op)) {
                auto n = std::make_shared<Node>();
                n->kind = Node::Kind::Unary;
                n->op = op;
                n->args = {parse_unary()};
                return n;
            }
        }
        return parse_primary();
    }

    NodePtr parse_primary() {
        const Token t = lx_.take();
        if (t.kind == Token::Kind::Number) {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Number;
            n->number = t.number;
            return n;
        }
        if (t.kind == Token::Kind::Name) {
            if (lx_.peek().kind == Token::Kind::Op && lx_.peek().op == '(') {
                lx_.take();
                auto n = std::make_shared<Node>();
                n->kind = Node::Kind::Call;
                n->name = t.name;
                if (!eat_op(')')) {
                    n->args.push_back(parse_or());
                    while (eat_op(',')) n->args.push_back(parse_or());
                    if (!eat_op(')')) throw ExprError("missing ')' after arguments of " + t.name);
                }
                return n;
            }
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Variable;
            n->name = t.name;
            return n;
        }
        if (t.kind == Token::Kind::Op && t.op == '(') {
            NodePtr inner = parse_or();
            if (!eat_op(')')) throw ExprError("missing closing ')'");
            return inner;
        }
        throw ExprError("expected a number, name, or '(' in expression");
    }

    Lexer lx_;
};

double eval_node(const Node& n, const Lookup& lookup) {
    switch (n.kind) {
        case Node::Kind::Number:
            return n.number;
        case Node::Kind::Variable:
            return lookup(n.name);
        case Node::Kind::Unary: {
            const double v = eval_node(*n.args[0], lookup);
            return n.op == '-' ? -v : (v != 0.0 ? 0.0 : 1.0);
        }
        case Node::Kind::Call: {
            const auto argc = n.args.size();
            auto arg = [&](std::size_t i) { return eval_node(*n.args[i], lookup); };
            if (n.name == "abs" && argc == 1) return std::fabs(arg(0));
            if (n.name == "min" && argc == 2) return std::fmin(arg(0), arg(1));
            if (n.name == "max" && argc == 2) return std::fmax(arg(0), arg(1));
            if (n.name == "log" && argc == 1) return std::log(arg(0));
            if (n.name == "exp" && argc == 1) return std::exp(arg(0));
            if (n.name == "sqrt" && argc == 1) return std::sqrt(arg(0));
            throw ExprError("unknown function '" + n.name + "' with " + std::to_string(argc) + " argument(s)");
        }
        case Node::Kind::Binary: {
            if (n.op == '&') {
                if (eval_node(*n.args[0], lookup) == 0.0) return 0.0;
                return eval_node(*n.args[1], lookup) != 0.0 ? 1.0 : 0.0;
            }
            if (n.op == '|') {
                if (eval_node(*n.args[0], lookup) != 0.0) return 1.0;
                return eval_node(*n.args[1], lookup) != 0.0 ? 1.0 : 0.0;
            }
            const double a = eval_node(*n.args[0], lookup);
            const double b = eval_node(*n.args[1], lookup);
            // Every comparison with a NaN operand is false, including '!=',
            // so that an undefined quantity can never satisfy a guard.
            const bool ok = !std::isnan(a) && !std::isnan(b);
            switch (n.op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                case '/': return a / b;
                case '<': return ok && a < b ? 1.0 : 0.0;
                case '>': return ok && a > b ? 1.0 : 0.0;
                case 'l': return ok && a <= b ? 1.0 : 0.0;
                case 'g': return ok && a >= b ? 1.0 : 0.0;
                case 'e': return ok && a == b ? 1.0 : 0.0;
                case 'n': return ok && a != b ? 1.0 : 0.0;
                default: throw ExprError("corrupt expression node");
            }
        }
    }
    throw ExprError("corrupt expression node");
}

}  // namespace

Expression Expression::parse(const std::string& text) {
    Expression e;
    e.root_ = Parser(text).parse();
    e.text_ = text;
    return e;
}

double Expression::evaluate(const Lookup& lookup) const {
    if (!root_) throw ExprError("evaluation of an empty expression");
    return eval_node(*root_, lookup);
}

Lookup lookup_in(const Environment& env) {
    return [&env](const std::string& name) -> double {
        auto it = env.find(name);
        if (it == env.end()) throw ExprError("unknown variable '" + name + "'");
        return it->second;
    };
}

double evaluate(const std::string& text, const Environment& env) {
    return Expression::parse(text).evaluate(lookup_in(env));
}

}  // namespace clonal::expr
