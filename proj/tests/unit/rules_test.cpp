#include <gtest/gtest.h>

#include "srml/rules.hpp"
#include "test_support.hpp"

namespace ts = testsupport;

namespace {

srml::RuleSet parse(const std::string& xml) { return srml::parse_standalone(srml::parse_document(xml)); }

std::string wrap_expr(const std::string& expr) {
  return "<srml-def><rules-for root=\"a\"><rule-def name=\"@x\"><rule-instance>" + expr +
         "</rule-instance></rule-def></rules-for></srml-def>";
}

}  // namespace

TEST(RuleParse, CartRules) {
  srml::RuleSet rules = ts::load_rules("cart.srml");
  ASSERT_EQ(rules.groups.size(), 4u);
  EXPECT_FALSE(rules.database);

  const auto& discount = rules.groups[0].defs[0];
  EXPECT_EQ(rules.groups[0].root, "cart");
  EXPECT_TRUE(discount.target.is_attribute());
  EXPECT_EQ(discount.target.name, "hasDiscount");
  EXPECT_EQ(discount.mode, srml::RuleMode::correct);
  EXPECT_EQ(discount.instances[0].message, "Discount value incorrectly set for cart");

  const auto& tolkien = rules.groups[1].defs[0];
  EXPECT_FALSE(tolkien.target.is_attribute());
  EXPECT_EQ(tolkien.mode, srml::RuleMode::validate);
  EXPECT_EQ(tolkien.instances[0].message,
            "This book is by J.R.R. Tolkien and does not have the discount set to 20 percent");

  const auto& total = rules.groups[3].defs[0];
  EXPECT_EQ(total.match, srml::RuleMatch::all);
  const auto* reg = std::get_if<srml::RegEvalExpr>(&total.instances[0].expr->node);
  ASSERT_NE(reg, nullptr);
  EXPECT_EQ(reg->tmpl.source, "#(../qty)*#(../price)*(1-#(../discount)/100)*(1+#(../tax)/100)");
}

TEST(RuleParse, UnwrappedAtomInSlot) {
  srml::RuleSet rules = ts::load_rules("cart.srml");
  const auto* cond = std::get_if<srml::IfExpr>(&rules.groups[2].defs[0].instances[0].expr->node);
  ASSERT_NE(cond, nullptr);
  EXPECT_TRUE(std::holds_alternative<srml::InstanceValueExpr>(cond->else_branch->node));
}

TEST(RuleParse, DatabaseSection) {
  srml::RuleSet rules = ts::load_rules("db/rules.srml");
  ASSERT_TRUE(rules.database);
  ASSERT_EQ(rules.database->tables.size(), 2u);
  EXPECT_EQ(rules.database->tables[1].name, "book");
  ASSERT_EQ(rules.database->references.size(), 1u);
  EXPECT_EQ(rules.database->references[0],
            (srml::ReferenceSpec{"cart", "ID", "book", "CART_ID"}));
  EXPECT_NO_THROW(srml::require_attribute_targets(rules));
}

TEST(RuleParse, RelationalRestriction) {
  srml::RuleSet rules = ts::load_rules("cart.srml");
  try {
    srml::require_attribute_targets(rules);
    FAIL();
  } catch (const srml::RuleSyntaxError& e) {
    EXPECT_NE(std::string(e.what()).find("relational-restriction"), std::string::npos);
  }
}

TEST(RuleParse, Errors) {
  EXPECT_THROW(parse("<srml-def/>"), srml::RuleSyntaxError);
  EXPECT_THROW(parse("<rules/>"), srml::RuleSyntaxError);
  EXPECT_THROW(parse(wrap_expr("<expr><bogus/></expr>")), srml::RuleSyntaxError);
  EXPECT_THROW(parse(wrap_expr("<expr><binary-op op=\"xor\"><data>1</data><data>2</data></binary-op></expr>")),
               srml::RuleSyntaxError);
  EXPECT_THROW(parse(wrap_expr("<expr><binary-op op=\"equal\"><data>1</data></binary-op></expr>")),
               srml::RuleSyntaxError);
  EXPECT_THROW(parse(wrap_expr("<expr><value-ref path=\"a//b\"/></expr>")), srml::RuleSyntaxError);
  EXPECT_THROW(parse(wrap_expr("<expr><reg-eval>1+</reg-eval></expr>")), srml::RuleSyntaxError);
  EXPECT_THROW(parse(wrap_expr("<validation-error>m</validation-error>")), srml::RuleSyntaxError);
  EXPECT_THROW(parse("<srml-def><rules-for root=\"a\"><rule-def name=\"@x\" mode=\"fix\"><rule-instance>"
                     "<expr><data>1</data></expr></rule-instance></rule-def></rules-for></srml-def>"),
               srml::RuleSyntaxError);
  EXPECT_THROW(parse("<srml-def><database><references><reference root=\"a\" root_key=\"k\" child=\"b\" "
                     "child_key=\"f\"/></references></database></srml-def>"),
               srml::RuleSyntaxError);
}

TEST(RulePrint, RoundTripsToAnEqualRuleSet) {
  for (const char* name : {"cart.srml", "expr.srml", "db/rules.srml"}) {
    srml::RuleSet rules = ts::load_rules(name);
    srml::Document printed = srml::print_ruleset(rules);
    EXPECT_EQ(srml::parse_standalone(printed), rules) << name;
    srml::Document reparsed = srml::parse_document(srml::serialize(printed));
    EXPECT_EQ(srml::print_ruleset(srml::parse_standalone(reparsed)), printed) << name;
  }
}

TEST(RuleMerge, ConcatenatesGroupsInOrder) {
  std::vector<srml::RuleSet> sets{ts::load_rules("cart.srml"), ts::load_rules("expr.srml")};
  srml::RuleSet merged = srml::merge_rulesets(sets);
  ASSERT_EQ(merged.groups.size(), 5u);
  EXPECT_EQ(merged.groups[4].root, "addexpr");
}
