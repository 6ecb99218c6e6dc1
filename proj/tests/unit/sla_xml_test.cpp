#include <doctest.h>

#include <random>

#include "sla/chat.hpp"
#include "sla/xml.hpp"
#include "support/chat_gen.hpp"

using namespace sla::chat;

namespace {

ChatDocument simple() {
  return *parse_chat("@Begin\n@Participants:\tROD Rodney Analyst\n*ROD:\tso we agree .\n@End\n").document;
}

std::string first_code(const SlaXmlResult& r) { return r.diagnostics.empty() ? "" : r.diagnostics.front().code; }

}  // namespace

TEST_CASE("one utterance maps to one <utterance> under <occasion>") {
  const std::string x = to_sla_xml(simple(), "O1");
  auto root = sla::xml::parse(x);
  CHECK(root.name == "occasion");
  CHECK(root.attr_or("id", "") == "O1");
  auto episodes = root.children_named("episode");
  REQUIRE(episodes.size() == 1);
  auto utts = episodes[0]->children_named("utterance");
  REQUIRE(utts.size() == 1);
  CHECK(utts[0]->attr_or("speaker", "") == "ROD");
  CHECK(utts[0]->child("text")->text == "so we agree");
}

TEST_CASE("%ind tiers become <index> elements") {
  auto doc = attach_tier(simple(), 0, "ind", "IDX:v2 MOVE=decision REALISATION=verbal 0_900");
  doc = attach_tier(doc, 0, "com", "after");
  auto root = sla::xml::parse(to_sla_xml(doc));
  const auto* u = root.child("episode")->child("utterance");
  REQUIRE(u->children.size() == 3);
  const auto& ix = u->children[1];
  CHECK(ix.name == "index");
  CHECK(ix.attr_or("network", "") == "IDX");
  CHECK(ix.attr_or("version", "") == "2");
  CHECK(ix.attr_or("span", "") == "0_900");
  CHECK(ix.text == "MOVE=decision REALISATION=verbal");
  CHECK(u->children[2].name == "tier");
  auto back = from_sla_xml(to_sla_xml(doc));
  REQUIRE(back.ok());
  CHECK(*back.document == doc);
}

TEST_CASE("headers-only document") {
  auto doc = *parse_chat("@Begin\n@Participants:\tROD Rodney Analyst\n@End\n").document;
  auto root = sla::xml::parse(to_sla_xml(doc));
  CHECK(root.child("participants") != nullptr);
  REQUIRE(root.children_named("episode").size() == 1);
  CHECK(root.child("episode")->children.empty());
}

TEST_CASE("schema and well-formedness errors") {
  const std::string good = to_sla_xml(simple());
  auto missing = good;
  auto a = missing.find("<participants>");
  auto b = missing.find("</participants>") + std::string("</participants>").size();
  missing.erase(a, b - a);
  CHECK(first_code(from_sla_xml(missing)) == "E011");

  CHECK(first_code(from_sla_xml(good.substr(0, good.size() / 2))) == "E010");
  CHECK(first_code(from_sla_xml("")) == "E010");
  CHECK(first_code(from_sla_xml("<occasion><participants/><episode><bogus/></episode></occasion>")) == "E011");
  CHECK(first_code(from_sla_xml("<session/>")) == "E011");
  CHECK(first_code(from_sla_xml(
            "<occasion><participants><participant code='ROD' role='A'/></participants>"
            "<episode><utterance speaker='ROD' terminator=';'><text>x</text></utterance></episode></occasion>")) ==
        "E011");
}

TEST_CASE("chat rules still apply after the schema") {
  auto r = from_sla_xml(
      "<occasion><participants><participant code='ROD' role='A'/></participants>"
      "<episode><utterance speaker='XYZ' terminator='.'><text>x</text></utterance></episode></occasion>");
  CHECK_FALSE(r.ok());
  CHECK(first_code(r) == "E003");
}

TEST_CASE("from_sla_xml inverts to_sla_xml") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 200; ++i) {
    auto doc = sla::testing::random_document(rng);
    auto r = from_sla_xml(to_sla_xml(doc, "OCC" + std::to_string(i)));
    REQUIRE_MESSAGE(r.ok(), std::string(r.diagnostics.front().code + " " + r.diagnostics.front().message));
    CHECK(*r.document == doc);
    CHECK(r.occasion_id == "OCC" + std::to_string(i));
  }
}

TEST_CASE("xml escaping round trips awkward text") {
  sla::xml::Element root("r");
  root.set_attr("a", "tab\there \"q\" <&> \n");
  root.add_child("c").text = "  a < b & c > d \"e\"  ";
  auto back = sla::xml::parse(sla::xml::write(root));
  CHECK(back == root);
}
