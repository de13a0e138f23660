#include <gtest/gtest.h>

#include <charconv>
#include <cmath>
#include <random>

#include "srml/expr.hpp"
#include "test_support.hpp"

namespace ts = testsupport;
using srml::EvalContext;
using srml::Value;

namespace {

const char* const total_template = "#(../qty)*#(../price)*(1-#(../discount)/100)*(1+#(../tax)/100)";

// Standalone book element with the given fields; returns the document and
// leaves `total` as the last child.
srml::Document book(const std::vector<std::pair<std::string, std::string>>& fields) {
  srml::Document doc("book");
  for (const auto& [k, v] : fields) doc.root().append_element(k).append_text(v);
  doc.root().append_element("total");
  return doc;
}

const srml::XmlNode& last(const srml::Document& doc) { return *doc.root().children().back(); }

srml::Value eval_str(const std::string& tmpl, const srml::XmlNode& node) {
  return srml::eval_template(tmpl, EvalContext{node, std::nullopt, ""});
}

std::string shortest(double d) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, r.ptr);
}

srml::ExprPtr first_expr(const srml::RuleSet& rules, std::size_t group) {
  return rules.groups[group].defs[0].instances[0].expr;
}

}  // namespace

TEST(Template, ParsesAndRejects) {
  EXPECT_NO_THROW(srml::parse_template(total_template));
  EXPECT_NO_THROW(srml::parse_template("  -(1.5 + 2) * 3 / 4 "));
  EXPECT_NO_THROW(srml::parse_template("#(../a[@k=\"x)\"]/@v) + 1"));
  for (const char* bad : {"", "1+", "(1", "1)", "#(", "#()", "#(a//b)", "1 2", "a", "1..2", "*3"}) {
    EXPECT_THROW(srml::parse_template(bad), srml::TemplateSyntaxError) << bad;
  }
}

TEST(Template, PrecedenceAndUnaryMinus) {
  srml::Document doc("x");
  EXPECT_DOUBLE_EQ(eval_str("2+3*4", doc.root()).as_num(), 14);
  EXPECT_DOUBLE_EQ(eval_str("(2+3)*4", doc.root()).as_num(), 20);
  EXPECT_DOUBLE_EQ(eval_str("8/4/2", doc.root()).as_num(), 1);
  EXPECT_DOUBLE_EQ(eval_str("10-4-3", doc.root()).as_num(), 3);
  EXPECT_DOUBLE_EQ(eval_str("-2*-3", doc.root()).as_num(), 6);
}

TEST(Template, CartTotals) {
  auto b1 = book({{"qty", "5"}, {"price", "100"}, {"discount", "0"}, {"tax", "25"}});
  EXPECT_DOUBLE_EQ(eval_str(total_template, last(b1)).as_num(), 625);
  auto b2 = book({{"qty", "1"}, {"price", "100"}, {"discount", "10"}, {"tax", "0"}});
  EXPECT_DOUBLE_EQ(eval_str(total_template, last(b2)).as_num(), 90);
}

TEST(Template, DecimalFormFollowsOperands) {
  auto plain = book({{"qty", "5"}, {"price", "100"}, {"discount", "0"}, {"tax", "125"}});
  Value v = eval_str(total_template, last(plain));
  EXPECT_EQ(v.to_string(true), "1125");
  auto dotted = book({{"qty", "5"}, {"price", "100.0"}, {"discount", "0"}, {"tax", "125.0"}});
  Value d = eval_str(total_template, last(dotted));
  EXPECT_EQ(d.to_string(true), "1125.0");
  EXPECT_EQ(d.to_string(false), "1125");
}

TEST(Template, Errors) {
  auto doc = book({{"qty", "five"}, {"price", "0"}, {"discount", "0"}, {"tax", "0"}});
  try {
    eval_str("#(../qty)", last(doc));
    FAIL();
  } catch (const srml::EvalError& e) {
    EXPECT_EQ(e.kind(), srml::EvalErrorKind::not_numeric);
  }
  try {
    eval_str("1/#(../price)", last(doc));
    FAIL();
  } catch (const srml::EvalError& e) {
    EXPECT_EQ(e.kind(), srml::EvalErrorKind::division_by_zero);
  }
  try {
    eval_str("#(../missing)", last(doc));
    FAIL();
  } catch (const srml::EvalError& e) {
    EXPECT_EQ(e.kind(), srml::EvalErrorKind::path_unresolved);
  }
}

TEST(Template, MatchesDirectArithmetic) {
  const auto tmpl = srml::parse_template(total_template);
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> qty(0, 20);
  std::uniform_real_distribution<double> price(0, 1000), discount(0, 100), tax(0, 200);
  for (int i = 0; i < 500; ++i) {
    double q = qty(rng), p = price(rng), d = discount(rng), t = tax(rng);
    auto doc = book({{"qty", shortest(q)}, {"price", shortest(p)}, {"discount", shortest(d)}, {"tax", shortest(t)}});
    double got = srml::eval_template(tmpl, EvalContext{last(doc), std::nullopt, ""}).as_num();
    double want = ts::total_oracle(q, p, d, t);
    EXPECT_LE(std::abs(got - want), 1e-9 * std::max(1.0, std::abs(want)));
  }
}

TEST(Coercion, Ladder) {
  EXPECT_TRUE(srml::values_equal(Value::str("90"), Value::num(90.0)));
  EXPECT_TRUE(srml::values_equal(Value::str("90.000"), Value::str("90")));
  EXPECT_TRUE(srml::values_equal(Value::num(0.1 + 0.2), Value::str("0.3")));
  EXPECT_FALSE(srml::values_equal(Value::str("90"), Value::str("90.1")));
  EXPECT_TRUE(srml::values_equal(Value::boolean(true), Value::str("true")));
  EXPECT_FALSE(srml::values_equal(Value::boolean(false), Value::str("true")));
  EXPECT_TRUE(srml::values_equal(Value::str("abc"), Value::str("abc")));
  EXPECT_FALSE(srml::values_equal(Value::str("abc"), Value::str("abd")));
  EXPECT_GT(srml::compare_values(Value::num(3), Value::str("2")), 0);
  EXPECT_GT(srml::compare_values(Value::str("10"), Value::str("9")), 0);
  EXPECT_THROW(srml::coerce_bool(Value::num(1)), srml::EvalError);
  EXPECT_THROW(srml::coerce_bool(Value::str("yes")), srml::EvalError);
}

TEST(Eval, DiscountRuleCountsBooks) {
  srml::RuleSet rules = ts::load_rules("cart.srml");
  srml::Document cart = ts::load("cart.xml");
  EvalContext ctx{cart.root(), std::string("hasDiscount"), "false"};
  EXPECT_EQ(srml::eval(*first_expr(rules, 0), ctx).to_string(), "false");
  cart.root().append_element("book");
  EXPECT_EQ(srml::eval(*first_expr(rules, 0), ctx).to_string(), "true");
}

TEST(Eval, InstanceValueElseBranch) {
  srml::RuleSet rules = ts::load_rules("cart.srml");
  srml::Document cart = ts::load("cart.xml");
  auto books = cart.root().child_elements("book");
  const auto& discount1 = *books[0]->child_elements("discount")[0];
  const auto& discount2 = *books[1]->child_elements("discount")[0];
  EXPECT_EQ(srml::eval(*first_expr(rules, 1), EvalContext{discount1, std::nullopt, "0"}).to_string(), "20");
  EXPECT_EQ(srml::eval(*first_expr(rules, 1), EvalContext{discount2, std::nullopt, "10"}).to_string(), "10");
}

TEST(Eval, TypeRuleOnExpressionTree) {
  srml::RuleSet rules = ts::load_rules("expr.srml");
  srml::Document doc = ts::load("expr.xml");
  auto add = srml::evaluate("//addexpr", doc.root());
  ASSERT_EQ(add.size(), 1u);
  EvalContext ctx{*add.nodes[0], std::string("type"), "real"};
  EXPECT_EQ(srml::eval(*first_expr(rules, 0), ctx).to_string(), "real");
}

TEST(Eval, ShortCircuit) {
  auto rules = srml::parse_standalone(srml::parse_document(
      "<srml-def><rules-for root=\"a\"><rule-def name=\"@x\"><rule-instance><expr>"
      "<binary-op op=\"or\"><expr><data>true</data></expr><expr><value-ref path=\"nothing\"/></expr></binary-op>"
      "</expr></rule-instance></rule-def></rules-for></srml-def>"));
  srml::Document doc("a");
  EXPECT_EQ(srml::eval(*first_expr(rules, 0), EvalContext{doc.root(), std::string("x"), ""}).to_string(), "true");
}

TEST(Numbers, Formatting) {
  EXPECT_EQ(srml::detail::format_number(90), "90");
  EXPECT_EQ(srml::detail::format_number(121.5), "121.5");
  EXPECT_EQ(srml::detail::format_number(-0.0), "0");
  EXPECT_EQ(srml::detail::format_number(1125, true), "1125.0");
  EXPECT_EQ(srml::detail::format_number(0.1 + 0.2), "0.30000000000000004");
  EXPECT_TRUE(srml::detail::is_decimal_literal(" 1.5 "));
  EXPECT_TRUE(srml::detail::is_decimal_literal(".5"));
  EXPECT_FALSE(srml::detail::is_decimal_literal("1e5"));
  EXPECT_FALSE(srml::detail::is_decimal_literal("abc"));
}
