#include "invariance/expression.hpp"

#include "invariance/linalg.hpp"

#include <cctype>
#include <charconv>

namespace invariance {

struct Expression::Node {
    enum class Kind { Literal, Space, Time, Neg, Add, Sub, Mul, Div };
    Kind kind = Kind::Literal;
    double value = 0.0;
    int index = 0;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr)
{
    auto node = std::make_shared<Expression::Node>();
    node->kind = kind;
    node->lhs = std::move(lhs);
    node->rhs = std::move(rhs);
    return node;
}

class Parser {
  public:
    Parser(std::string_view text, int dim) : text_(text), dim_(dim) {}

    NodePtr parse_all()
    {
        NodePtr root = expr();
        skip_space();
        if (pos_ != text_.size()) {
            fail("unexpected character");
        }
        return root;
    }

    bool uses_x = false;
    bool uses_t = false;

  private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw InputError("expression '" + std::string(text_) + "': " + what + " at column " +
                         std::to_string(pos_ + 1));
    }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c)
    {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr()
    {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = make(Kind::Add, lhs, term());
            } else if (accept('-')) {
                lhs = make(Kind::Sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term()
    {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = make(Kind::Mul, lhs, unary());
            } else if (accept('/')) {
                lhs = make(Kind::Div, lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary()
    {
        if (accept('-')) {
            return make(Kind::Neg, unary());
        }
        if (accept('+')) {
            return unary();
        }
        return atom();
    }

    NodePtr atom()
    {
        skip_space();
        if (pos_ >= text_.size()) {
            fail("unexpected end of input");
        }
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = expr();
            if (!accept(')')) {
                fail("expected ')'");
            }
            return inner;
        }
        if (c == 't') {
            ++pos_;
            uses_t = true;
            return make(Kind::Time);
        }
        if (c == 'x') {
            ++pos_;
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
            }
            if (start == pos_) {
                fail("expected variable index after 'x'");
            }
            int index = 0;
            std::from_chars(text_.data() + start, text_.data() + pos_, index);
            if (index < 1 || index > dim_) {
                fail("variable x" + std::to_string(index) + " out of range");
            }
            auto node = std::make_shared<Expression::Node>();
            node->kind = Kind::Space;
            node->index = index - 1;
            uses_x = true;
            return node;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double value = 0.0;
            auto [end, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
            if (ec != std::errc()) {
                fail("malformed number");
            }
            pos_ = static_cast<std::size_t>(end - text_.data());
            auto node = std::make_shared<Expression::Node>();
            node->kind = Kind::Literal;
            node->value = value;
            return node;
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    std::string_view text_;
    int dim_;
    std::size_t pos_ = 0;
};

double evaluate(const Expression::Node& node, std::span<const double> x, double t)
{
    switch (node.kind) {
    case Kind::Literal: return node.value;
    case Kind::Space: return x[static_cast<std::size_t>(node.index)];
    case Kind::Time: return t;
    case Kind::Neg: return -evaluate(*node.lhs, x, t);
    case Kind::Add: return evaluate(*node.lhs, x, t) + evaluate(*node.rhs, x, t);
    case Kind::Sub: return evaluate(*node.lhs, x, t) - evaluate(*node.rhs, x, t);
    case Kind::Mul: return evaluate(*node.lhs, x, t) * evaluate(*node.rhs, x, t);
    case Kind::Div: return evaluate(*node.lhs, x, t) / evaluate(*node.rhs, x, t);
    }
    return 0.0;
}

}  // namespace

Expression::Expression()
{
    auto node = std::make_shared<Node>();
    node->kind = Node::Kind::Literal;
    root_ = std::move(node);
    text_ = "0";
}

Expression Expression::parse(std::string_view text, int space_dim)
{
    Parser parser(text, space_dim);
    Expression out;
    out.root_ = parser.parse_all();
    out.text_ = std::string(text);
    out.uses_x_ = parser.uses_x;
    out.uses_t_ = parser.uses_t;
    return out;
}

Expression Expression::constant(double value)
{
    auto node = std::make_shared<Node>();
    node->kind = Node::Kind::Literal;
    node->value = value;
    Expression out;
    out.root_ = std::move(node);
    out.text_ = std::to_string(value);
    return out;
}

double Expression::operator()(std::span<const double> x, double t) const
{
    return evaluate(*root_, x, t);
}

}  // namespace invariance
