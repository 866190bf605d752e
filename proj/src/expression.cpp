#include "gtsens/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace gtsens {

struct Expression::Node {
    enum class Kind { Constant, Variable, Add, Sub, Mul, Neg, Pow };
    Kind kind;
    double value = 0.0;       // Constant
    std::size_t index = 0;    // Variable (0-based)
    unsigned exponent = 0;    // Pow
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

class Parser {
public:
    Parser(const std::string& text, std::size_t n_species, std::set<std::size_t>& vars)
        : text_(text), n_species_(n_species), vars_(vars) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != text_.size())
            fail("unexpected trailing input");
        return e;
    }

private:
    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            skip_ws();
            if (accept('+')) {
                lhs = binary(Node::Kind::Add, lhs, term());
            } else if (accept('-')) {
                lhs = binary(Node::Kind::Sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            skip_ws();
            if (accept('*')) {
                lhs = binary(Node::Kind::Mul, lhs, factor());
            } else {
                return lhs;
            }
        }
    }

    NodePtr factor() {
        skip_ws();
        if (accept('-')) {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Neg;
            n->lhs = factor();
            return n;
        }
        NodePtr base = atom();
        skip_ws();
        if (accept('^')) {
            skip_ws();
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (start == pos_) fail("expected integer exponent after '^'");
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Pow;
            n->exponent = static_cast<unsigned>(std::strtoul(text_.substr(start, pos_ - start).c_str(), nullptr, 10));
            n->lhs = base;
            return n;
        }
        return base;
    }

    NodePtr atom() {
        skip_ws();
        if (accept('(')) {
            NodePtr e = expr();
            skip_ws();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'x' || text_[pos_] == 'X')) {
            std::size_t start = ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (start == pos_) fail("expected species index after 'x'");
            unsigned long idx = std::strtoul(text_.substr(start, pos_ - start).c_str(), nullptr, 10);
            if (idx == 0) fail("species indices start at x1");
            if (n_species_ != 0 && idx > n_species_) fail("species index x" + std::to_string(idx) + " out of range");
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Variable;
            n->index = idx - 1;
            vars_.insert(n->index);
            return n;
        }
        if (pos_ < text_.size() &&
            (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
            const char* begin = text_.c_str() + pos_;
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            if (end == begin) fail("malformed number");
            pos_ += static_cast<std::size_t>(end - begin);
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Constant;
            n->value = v;
            return n;
        }
        fail("expected constant, species variable, or '('");
        return nullptr;
    }

    NodePtr binary(Node::Kind kind, NodePtr lhs, NodePtr rhs) {
        auto n = std::make_shared<Node>();
        n->kind = kind;
        n->lhs = std::move(lhs);
        n->rhs = std::move(rhs);
        return n;
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) {
        throw ExpressionError("expression error at position " + std::to_string(pos_) + ": " + msg +
                              " in \"" + text_ + "\"");
    }

    const std::string& text_;
    std::size_t n_species_;
    std::set<std::size_t>& vars_;
    std::size_t pos_ = 0;
};

double eval_node(const Node& n, std::span<const std::int64_t> state) {
    switch (n.kind) {
        case Node::Kind::Constant:
            return n.value;
        case Node::Kind::Variable:
            if (n.index >= state.size())
                throw ExpressionError("species index out of range at evaluation");
            return static_cast<double>(state[n.index]);
        case Node::Kind::Add:
            return eval_node(*n.lhs, state) + eval_node(*n.rhs, state);
        case Node::Kind::Sub:
            return eval_node(*n.lhs, state) - eval_node(*n.rhs, state);
        case Node::Kind::Mul:
            return eval_node(*n.lhs, state) * eval_node(*n.rhs, state);
        case Node::Kind::Neg:
            return -eval_node(*n.lhs, state);
        case Node::Kind::Pow: {
            double base = eval_node(*n.lhs, state);
            double out = 1.0;
            for (unsigned i = 0; i < n.exponent; ++i) out *= base;
            return out;
        }
    }
    return 0.0;
}

}  // namespace

Expression Expression::parse(const std::string& text, std::size_t n_species) {
    Expression e;
    e.text_ = text;
    Parser p(text, n_species, e.variables_);
    e.root_ = p.parse();
    return e;
}

double Expression::eval(std::span<const std::int64_t> state) const {
    if (!root_) throw ExpressionError("evaluating empty expression");
    return eval_node(*root_, state);
}

}  // namespace gtsens
