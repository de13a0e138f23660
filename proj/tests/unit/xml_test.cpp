#include <gtest/gtest.h>

#include <random>

#include "srml/xml.hpp"
#include "test_support.hpp"

namespace ts = testsupport;
using srml::Document;
using srml::parse_document;
using srml::serialize;

TEST(XmlParse, ElementsAttributesAndText) {
  Document doc = parse_document(R"(<a x="1" y='two'><b>hi</b><c/></a>)");
  const auto& root = doc.root();
  EXPECT_EQ(root.name(), "a");
  ASSERT_NE(root.attribute("x"), nullptr);
  EXPECT_EQ(*root.attribute("x"), "1");
  EXPECT_EQ(*root.attribute("y"), "two");
  auto kids = root.child_elements();
  ASSERT_EQ(kids.size(), 2u);
  EXPECT_EQ(srml::text_content(*kids[0]), "hi");
  EXPECT_TRUE(kids[1]->children().empty());
}

TEST(XmlParse, DropsWhitespaceOnlyTextAndMarkup) {
  Document doc = parse_document(
      "<?xml version=\"1.0\"?>\n<!DOCTYPE a>\n<!-- c -->\n<a>\n  <?pi x?>\n  <b/>\n  <!-- inner -->\n</a>\n");
  ASSERT_EQ(doc.root().children().size(), 1u);
  EXPECT_EQ(doc.root().children()[0]->name(), "b");
}

TEST(XmlParse, DecodesEntitiesAndCharacterReferences) {
  Document doc = parse_document("<a t=\"&lt;&amp;&gt;&quot;&apos;\">&#65;&#x42;&#x20AC;</a>");
  EXPECT_EQ(*doc.root().attribute("t"), "<&>\"'");
  EXPECT_EQ(srml::text_content(doc.root()), "AB\xE2\x82\xAC");
}

TEST(XmlParse, KeepsCdataVerbatim) {
  Document doc = parse_document("<a><![CDATA[<x> & y]]></a>");
  EXPECT_EQ(srml::text_content(doc.root()), "<x> & y");
}

TEST(XmlParse, CharacterReferenceWhitespaceIsKept) {
  Document doc = parse_document("<a>&#32;</a>");
  EXPECT_EQ(srml::text_content(doc.root()), " ");
}

TEST(XmlParse, RejectsMalformedInputWithPosition) {
  for (const char* bad : {"<a><b></a></b>", "<a>", "<a></b>", "", "<a/><b/>", "<a x=1/>", "<a x='1' x='2'/>",
                          "<a>&bogus;</a>", "<a>&#0;</a>", "text", "<1a/>", "<a><!-- x --</a>"}) {
    EXPECT_THROW(parse_document(bad), srml::WellFormednessError) << bad;
  }
  try {
    parse_document("<a>\n  <b>\n</a>");
    FAIL();
  } catch (const srml::WellFormednessError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(XmlParse, RejectsInvalidUtf8) {
  EXPECT_THROW(parse_document("<a>\xC3</a>"), srml::WellFormednessError);
  EXPECT_THROW(parse_document("<a>\xFF</a>"), srml::WellFormednessError);
}

TEST(XmlSerialize, EscapesAndIndents) {
  Document doc("a");
  doc.root().set_attribute("q", "\"<&>'");
  doc.root().append_element("b").append_text("x < y & z");
  EXPECT_EQ(serialize(doc),
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            "<a q=\"&quot;&lt;&amp;&gt;&apos;\">\n"
            "  <b>x &lt; y &amp; z</b>\n"
            "</a>\n");
}

TEST(XmlSerialize, MixedContentStaysInline) {
  Document doc = parse_document("<p>one <b>two</b> three</p>");
  Document again = parse_document(serialize(doc));
  EXPECT_EQ(doc, again);
  EXPECT_EQ(srml::text_content(again.root()), "one two three");
}

TEST(XmlSerialize, WhitespaceOnlyTextSurvivesRoundTrip) {
  Document doc("a");
  doc.root().append_text("  ");
  EXPECT_EQ(parse_document(serialize(doc)), doc);
}

TEST(XmlTree, DeepCopyIsIndependent) {
  Document a = parse_document("<a><b>1</b></a>");
  Document b = a;
  srml::set_value(*b.root().child_elements("b")[0], "2");
  EXPECT_EQ(srml::text_content(a.root()), "1");
  EXPECT_EQ(srml::text_content(b.root()), "2");
  EXPECT_FALSE(a == b);
}

TEST(XmlTree, SetValueReplacesChildren) {
  Document doc = parse_document("<a><b/>old</a>");
  srml::set_value(doc.root(), "new");
  ASSERT_EQ(doc.root().children().size(), 1u);
  EXPECT_EQ(srml::text_content(doc.root()), "new");
  srml::set_value(doc.root(), "");
  EXPECT_TRUE(doc.root().children().empty());
  srml::set_value(doc.root(), "k", "v");
  EXPECT_EQ(*doc.root().attribute("k"), "v");
}

TEST(XmlTree, NodeLocations) {
  Document doc = ts::load("cart.xml");
  auto books = doc.root().child_elements("book");
  ASSERT_EQ(books.size(), 2u);
  EXPECT_EQ(srml::node_location(doc.root()), "/cart");
  EXPECT_EQ(srml::node_location(*books[1]->child_elements("tax")[0]), "/cart/book[2]/tax");
  EXPECT_EQ(srml::attribute_location(*books[0], "cover"), "/cart/book[1]/@cover");
}

TEST(XmlTree, RemoveChildAndAttribute) {
  Document doc = parse_document("<a k=\"1\"><b/><c/></a>");
  auto* b = doc.root().child_elements("b")[0];
  EXPECT_NE(doc.root().remove_child(*b), nullptr);
  EXPECT_EQ(doc.root().child_elements().size(), 1u);
  EXPECT_TRUE(doc.root().remove_attribute("k"));
  EXPECT_FALSE(doc.root().remove_attribute("k"));
}

TEST(XmlRoundTrip, Fixtures) {
  for (const char* name : {"cart.xml", "cart.xsd", "cart_rules.xsd", "books.xml", "expr.xml", "cart.srml",
                           "expr.srml", "db/rules.srml"}) {
    Document doc = ts::load(name);
    std::string once = serialize(doc);
    EXPECT_EQ(parse_document(once), doc) << name;
    EXPECT_EQ(serialize(parse_document(once)), once) << name;
  }
}

TEST(XmlRoundTrip, RandomTrees) {
  std::mt19937 rng(11);
  for (int i = 0; i < 100; ++i) {
    Document doc = ts::random_tree(rng, 40);
    EXPECT_EQ(parse_document(serialize(doc)), doc);
  }
}
