#pragma once

// Forest-to-source export and a reference interpreter for the exported text.
// Each tree becomes one pure function of the ten named features, written as
// nested if/else over `feature <= threshold` comparisons; a `predict`
// wrapper accumulates the per-tree results and divides by the tree count,
// mirroring the in-memory prediction operation for exact round trips.

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dds/csv.hpp"
#include "dds/forest.hpp"

namespace dds {

struct CodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string canonical_params() {
  std::string out;
  const auto names = FeatureVector::names();
  for (int i = 0; i < kFeatureCount; ++i) {
    if (i) out += ", ";
    out += "double ";
    out += names[static_cast<std::size_t>(i)];
  }
  return out;
}

inline std::string canonical_args() {
  std::string out;
  const auto names = FeatureVector::names();
  for (int i = 0; i < kFeatureCount; ++i) {
    if (i) out += ", ";
    out += names[static_cast<std::size_t>(i)];
  }
  return out;
}

inline void emit_tree_node(const RegressionTree& t, int id, int depth, std::string& out) {
  const TreeNode& n = t.nodes[static_cast<std::size_t>(id)];
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  if (n.is_leaf()) {
    out += pad + "return " + format_double(n.value) + ";\n";
    return;
  }
  out += pad + "if (" + FeatureVector::names()[static_cast<std::size_t>(n.feature)] + " <= " +
         format_double(n.threshold) + ") {\n";
  emit_tree_node(t, n.left, depth + 1, out);
  out += pad + "} else {\n";
  emit_tree_node(t, n.right, depth + 1, out);
  out += pad + "}\n";
}

}  // namespace detail

// Self-contained nested-conditional source text for the whole forest.
inline std::string export_code(const RandomForest& f) {
  const std::string params = detail::canonical_params();
  const std::string args = detail::canonical_args();
  std::string out = "// regression forest, " + std::to_string(f.trees.size()) + " trees\n\n";
  for (std::size_t i = 0; i < f.trees.size(); ++i) {
    out += "double tree_" + std::to_string(i) + "(" + params + ") {\n";
    detail::emit_tree_node(f.trees[i], 0, 1, out);
    out += "}\n\n";
  }
  out += "double predict(" + params + ") {\n";
  out += "  double acc = 0;\n";
  for (std::size_t i = 0; i < f.trees.size(); ++i)
    out += "  acc += tree_" + std::to_string(i) + "(" + args + ");\n";
  out += "  return acc / " + std::to_string(f.trees.size()) + ";\n";
  out += "}\n";
  return out;
}

// --- interpreter --------------------------------------------------------

namespace detail {

struct Token {
  enum Kind { ident, number, punct, eof } kind = eof;
  std::string text;
  double value = 0;
  std::size_t line = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw CodeError("parse error, line " + std::to_string(line_) + ": " + what);
  }

  void advance() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
    tok_ = Token{};
    tok_.line = line_;
    if (pos_ >= src_.size()) {
      tok_.kind = Token::eof;
      return;
    }
    const char c = src_[pos_];
    if (is_ident_start(c)) {
      std::size_t end = pos_;
      while (end < src_.size() && is_ident_char(src_[end])) ++end;
      tok_.kind = Token::ident;
      tok_.text = std::string(src_.substr(pos_, end - pos_));
      pos_ = end;
      return;
    }
    if ((c >= '0' && c <= '9') || c == '.' ||
        (c == '-' && pos_ + 1 < src_.size() &&
         ((src_[pos_ + 1] >= '0' && src_[pos_ + 1] <= '9') || src_[pos_ + 1] == '.'))) {
      double v = 0;
      auto [p, ec] = std::from_chars(src_.data() + pos_, src_.data() + src_.size(), v);
      if (ec != std::errc()) fail("malformed number");
      tok_.kind = Token::number;
      tok_.text = std::string(src_.substr(pos_, static_cast<std::size_t>(p - (src_.data() + pos_))));
      tok_.value = v;
      pos_ = static_cast<std::size_t>(p - src_.data());
      return;
    }
    if (c == '<' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
      tok_.kind = Token::punct;
      tok_.text = "<=";
      pos_ += 2;
      return;
    }
    if (c == '+' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
      tok_.kind = Token::punct;
      tok_.text = "+=";
      pos_ += 2;
      return;
    }
    if (c == '(' || c == ')' || c == '{' || c == '}' || c == ';' || c == ',' || c == '/' ||
        c == '=') {
      tok_.kind = Token::punct;
      tok_.text = std::string(1, c);
      ++pos_;
      return;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  Token tok_;
};

struct ExprNode {
  bool leaf = true;
  double value = 0;   // leaf return
  int param = -1;     // split: parameter position tested
  double threshold = 0;
  int left = -1;
  int right = -1;
};

struct ParsedFunction {
  std::vector<std::string> params;
  // tree form
  bool is_tree = true;
  std::vector<ExprNode> nodes;
  // wrapper form: acc accumulation over calls, then a division
  double acc_init = 0;
  struct Call {
    std::string callee;
    std::vector<int> arg_positions;  // indices into this function's params
  };
  std::vector<Call> calls;
  double divisor = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) {}

  std::map<std::string, ParsedFunction> parse_program() {
    std::map<std::string, ParsedFunction> funcs;
    while (lex_.peek().kind != Token::eof) {
      expect_ident("double");
      const std::string name = take_ident();
      ParsedFunction fn;
      expect_punct("(");
      while (true) {
        expect_ident("double");
        fn.params.push_back(take_ident());
        if (lex_.peek().kind == Token::punct && lex_.peek().text == ",") {
          lex_.take();
          continue;
        }
        break;
      }
      expect_punct(")");
      expect_punct("{");
      if (lex_.peek().kind == Token::ident && lex_.peek().text == "double") {
        fn.is_tree = false;
        parse_wrapper_body(fn);
      } else {
        fn.is_tree = true;
        parse_tree_node(fn);
      }
      expect_punct("}");
      if (!funcs.emplace(name, std::move(fn)).second)
        fail("duplicate function '" + name + "'");
    }
    if (funcs.empty()) fail("no functions found");
    return funcs;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw CodeError("parse error, line " + std::to_string(lex_.peek().line) + ": " + what);
  }

  std::string take_ident() {
    if (lex_.peek().kind != Token::ident) fail("expected identifier, got '" + lex_.peek().text + "'");
    return lex_.take().text;
  }

  double take_number() {
    if (lex_.peek().kind != Token::number) fail("expected number, got '" + lex_.peek().text + "'");
    return lex_.take().value;
  }

  void expect_ident(const std::string& word) {
    if (lex_.peek().kind != Token::ident || lex_.peek().text != word)
      fail("expected '" + word + "', got '" + lex_.peek().text + "'");
    lex_.take();
  }

  void expect_punct(const std::string& p) {
    if (lex_.peek().kind != Token::punct || lex_.peek().text != p)
      fail("expected '" + p + "', got '" + lex_.peek().text + "'");
    lex_.take();
  }

  int param_position(const ParsedFunction& fn, const std::string& name) {
    for (std::size_t i = 0; i < fn.params.size(); ++i)
      if (fn.params[i] == name) return static_cast<int>(i);
    fail("unknown identifier '" + name + "'");
  }

  // node := 'return' NUMBER ';'
  //       | 'if' '(' IDENT '<=' NUMBER ')' '{' node '}' 'else' '{' node '}'
  int parse_tree_node(ParsedFunction& fn) {
    const int id = static_cast<int>(fn.nodes.size());
    fn.nodes.emplace_back();
    if (lex_.peek().kind == Token::ident && lex_.peek().text == "return") {
      lex_.take();
      fn.nodes[static_cast<std::size_t>(id)].value = take_number();
      expect_punct(";");
      return id;
    }
    expect_ident("if");
    expect_punct("(");
    const std::string var = take_ident();
    fn.nodes[static_cast<std::size_t>(id)].leaf = false;
    fn.nodes[static_cast<std::size_t>(id)].param = param_position(fn, var);
    expect_punct("<=");
    fn.nodes[static_cast<std::size_t>(id)].threshold = take_number();
    expect_punct(")");
    expect_punct("{");
    const int l = parse_tree_node(fn);
    fn.nodes[static_cast<std::size_t>(id)].left = l;
    expect_punct("}");
    expect_ident("else");
    expect_punct("{");
    const int r = parse_tree_node(fn);
    fn.nodes[static_cast<std::size_t>(id)].right = r;
    expect_punct("}");
    return id;
  }

  // 'double' IDENT '=' NUMBER ';'
  // (IDENT '+=' IDENT '(' IDENT {',' IDENT} ')' ';')*
  // 'return' IDENT '/' NUMBER ';'
  void parse_wrapper_body(ParsedFunction& fn) {
    expect_ident("double");
    const std::string acc = take_ident();
    expect_punct("=");
    fn.acc_init = take_number();
    expect_punct(";");
    while (lex_.peek().kind == Token::ident && lex_.peek().text == acc) {
      lex_.take();
      expect_punct("+=");
      ParsedFunction::Call call;
      call.callee = take_ident();
      expect_punct("(");
      while (true) {
        call.arg_positions.push_back(param_position(fn, take_ident()));
        if (lex_.peek().kind == Token::punct && lex_.peek().text == ",") {
          lex_.take();
          continue;
        }
        break;
      }
      expect_punct(")");
      expect_punct(";");
      fn.calls.push_back(std::move(call));
    }
    expect_ident("return");
    if (take_ident() != acc) fail("wrapper must return the accumulator");
    expect_punct("/");
    fn.divisor = take_number();
    expect_punct(";");
  }

  Lexer lex_;
};

inline double eval_tree_fn(const ParsedFunction& fn, const std::vector<double>& args) {
  int i = 0;
  while (!fn.nodes[static_cast<std::size_t>(i)].leaf) {
    const ExprNode& n = fn.nodes[static_cast<std::size_t>(i)];
    i = args[static_cast<std::size_t>(n.param)] <= n.threshold ? n.left : n.right;
  }
  return fn.nodes[static_cast<std::size_t>(i)].value;
}

}  // namespace detail

// Exported text parsed once, evaluable many times. The entry point is the
// function named `predict` when present, otherwise the single function in
// the text; its parameters bind positionally to the ten feature values.
class CompiledCode {
 public:
  explicit CompiledCode(std::string_view src) : funcs_(detail::Parser(src).parse_program()) {
    auto entry = funcs_.find("predict");
    if (entry == funcs_.end()) {
      if (funcs_.size() != 1)
        throw CodeError("eval: no 'predict' function and more than one candidate");
      entry = funcs_.begin();
    }
    entry_ = &entry->second;
    if (entry_->params.size() != kFeatureCount)
      throw CodeError("eval: entry function must take the ten feature parameters");
    if (!entry_->is_tree) {
      for (const auto& call : entry_->calls) {
        const auto it = funcs_.find(call.callee);
        if (it == funcs_.end() || !it->second.is_tree)
          throw CodeError("eval: call to unknown function '" + call.callee + "'");
        if (call.arg_positions.size() != it->second.params.size())
          throw CodeError("eval: argument count mismatch in call to '" + call.callee + "'");
        callees_.push_back(&it->second);
      }
    }
  }

  double eval(const FeatureVector& x) const {
    std::vector<double> input(kFeatureCount);
    for (int i = 0; i < kFeatureCount; ++i) input[static_cast<std::size_t>(i)] = x[i];
    if (entry_->is_tree) return detail::eval_tree_fn(*entry_, input);

    double acc = entry_->acc_init;
    std::vector<double> args;
    for (std::size_t c = 0; c < callees_.size(); ++c) {
      const auto& call = entry_->calls[c];
      args.resize(call.arg_positions.size());
      for (std::size_t i = 0; i < args.size(); ++i)
        args[i] = input[static_cast<std::size_t>(call.arg_positions[i])];
      acc += detail::eval_tree_fn(*callees_[c], args);
    }
    if (entry_->divisor == 0) throw CodeError("eval: zero divisor");
    return acc / entry_->divisor;
  }

 private:
  std::map<std::string, detail::ParsedFunction> funcs_;
  const detail::ParsedFunction* entry_ = nullptr;
  std::vector<const detail::ParsedFunction*> callees_;
};

// One-shot convenience wrapper around CompiledCode.
inline double eval_code(std::string_view src, const FeatureVector& x) {
  return CompiledCode(src).eval(x);
}

}  // namespace dds
