#include <gtest/gtest.h>

#include "support.hpp"

using namespace scenematch;
using namespace testsupport;

namespace {

ParseError::Kind error_kind(const std::string& text) {
    try {
        parse_description(text);
    } catch (const ParseError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error for: " << text;
    return ParseError::Kind::Syntax;
}

} // namespace

TEST(Parse, SingleObjectWithHunt) {
    const auto d = parse_description("red floodgate[hunt]");
    ASSERT_EQ(d.alternatives.size(), 1u);
    const auto& alt = d.alternatives[0];
    ASSERT_EQ(alt.objects.size(), 1u);
    EXPECT_TRUE(alt.objects[0].is_hunt);
    EXPECT_EQ(alt.objects[0].type_atom(), "floodgate");
    EXPECT_EQ(alt.objects[0].formula,
              AttributeFormula::conj({AttributeFormula::leaf("red"), AttributeFormula::leaf("floodgate")}));
    EXPECT_TRUE(alt.relations.empty());
}

TEST(Parse, ChainWithOneRelation) {
    const auto d = parse_description("horizontal pipe on red floodgate[hunt]");
    const auto& alt = d.alternatives.at(0);
    ASSERT_EQ(alt.objects.size(), 2u);
    EXPECT_EQ(alt.objects[0].type_atom(), "pipe");
    EXPECT_FALSE(alt.objects[0].is_hunt);
    EXPECT_TRUE(alt.objects[1].is_hunt);
    ASSERT_EQ(alt.relations.size(), 1u);
    EXPECT_EQ(alt.relations[0].formula, RelationFormula::leaf("on"));
    EXPECT_EQ(alt.relations[0].args, (std::vector<std::string>{"o1", "o2"}));
}

TEST(Parse, ThreeObjectChain) {
    const auto d = parse_description("vertical elongated pipe elbow horizontal pipe on red floodgate[hunt]");
    const auto& alt = d.alternatives.at(0);
    ASSERT_EQ(alt.objects.size(), 3u);
    ASSERT_EQ(alt.relations.size(), 2u);
    EXPECT_EQ(alt.relations[0].formula, RelationFormula::leaf("elbow"));
    EXPECT_EQ(alt.relations[1].formula, RelationFormula::leaf("on"));
    EXPECT_EQ(alt.hunt_index(), 2u);
}

TEST(Parse, ChainWithoutMarkerHuntsLastObject) {
    const auto d = parse_description("horizontal pipe on red floodgate");
    EXPECT_EQ(d.alternatives[0].hunt_index(), 1u);
}

TEST(Parse, CaseAndAliases) {
    const auto d = parse_description("Gray T-Square near to SUPER-CHARGER[hunt]");
    const auto& alt = d.alternatives[0];
    EXPECT_EQ(alt.objects[0].formula,
              AttributeFormula::conj({AttributeFormula::leaf("grey"), AttributeFormula::leaf("tsquare")}));
    EXPECT_EQ(alt.objects[1].type_atom(), "supercharger");
    EXPECT_EQ(alt.relations[0].formula, RelationFormula::leaf("near_from"));
}

TEST(Parse, CompoundRelationPhrase) {
    const auto d = parse_description("pipe connected on the left to pipe[hunt]");
    EXPECT_EQ(d.alternatives[0].relations[0].formula,
              RelationFormula::conj({RelationFormula::leaf("connected_to"), RelationFormula::leaf("on_the_left_to")}));
}

TEST(Parse, StructuredFormWithConnectives) {
    const auto d = parse_description(R"(
        object a: pipe and (red or not blue) [hunt]
        object b: floodgate
        relation on or not near_from (b, a)
    )");
    const auto& alt = d.alternatives[0];
    EXPECT_EQ(alt.objects[0].formula,
              AttributeFormula::conj({AttributeFormula::leaf("pipe"),
                                      AttributeFormula::disj({AttributeFormula::leaf("red"),
                                                              AttributeFormula::negate(AttributeFormula::leaf("blue"))})}));
    EXPECT_EQ(alt.relations[0].formula,
              RelationFormula::disj({RelationFormula::leaf("on"),
                                     RelationFormula::negate(RelationFormula::leaf("near_from"))}));
    EXPECT_EQ(alt.relations[0].args, (std::vector<std::string>{"b", "a"}));
}

TEST(Parse, AlternativesSeparatedByOr) {
    const auto d = parse_description("{ red floodgate[hunt] } or { object p: blue and pipe [hunt] }");
    ASSERT_EQ(d.alternatives.size(), 2u);
    EXPECT_EQ(d.alternatives[1].objects[0].id, "p");
}

TEST(ParseErrors, Kinds) {
    EXPECT_EQ(error_kind("red floodgate on"), ParseError::Kind::Syntax);
    EXPECT_EQ(error_kind("purple floodgate"), ParseError::Kind::UnknownPredicate);
    EXPECT_EQ(error_kind("object a: pipe [hunt] object b: floodgate relation on (a)"),
              ParseError::Kind::ArityMismatch);
    EXPECT_EQ(error_kind("object a: pipe object b: floodgate relation on (a, b)"), ParseError::Kind::MissingHunt);
    EXPECT_EQ(error_kind("red floodgate[hunt] on pipe[hunt]"), ParseError::Kind::DuplicateHunt);
    EXPECT_EQ(error_kind(""), ParseError::Kind::Syntax);
    EXPECT_EQ(error_kind("object a: pipe [hunt] relation above (a, a)"), ParseError::Kind::Invalid);
}

TEST(ParseErrors, PositionAndExpectation) {
    try {
        parse_description("red floodgate zz");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.position(), 14u);
        EXPECT_FALSE(e.expected().empty());
    }
}

TEST(Validate, Diagnostics) {
    Alternative alt;
    alt.objects.push_back({"a", AttributeFormula::conj({AttributeFormula::leaf("pipe"), AttributeFormula::leaf("floodgate")}), true});
    alt.objects.push_back({"a", AttributeFormula::leaf("red"), false});
    alt.relations.push_back({RelationFormula::leaf("on"), {"a", "zz"}});
    const auto diags = validate_alternative(alt, 0);
    auto has = [&](DiagCode c) {
        return std::any_of(diags.begin(), diags.end(), [&](const Diagnostic& d) { return d.code == c; });
    };
    EXPECT_TRUE(has(DiagCode::MultipleTypeAtoms));
    EXPECT_TRUE(has(DiagCode::DuplicateObjectId));
    EXPECT_TRUE(has(DiagCode::MissingTypeAtom));
    EXPECT_TRUE(has(DiagCode::UnknownObjectRef));
}

TEST(Validate, TypeAtomUnderNegationDoesNotCount) {
    Alternative alt;
    alt.objects.push_back(
        {"a", AttributeFormula::conj({AttributeFormula::leaf("pipe"), AttributeFormula::negate(AttributeFormula::leaf("elbow"))}),
         true});
    EXPECT_TRUE(validate_alternative(alt, 0).empty());
    EXPECT_TRUE(validate_description(Description{}).size() == 1);
}

TEST(Print, ChainShapesPrintAsChains) {
    for (const auto& s : reference_strings()) {
        const auto d = parse_description(s);
        const auto printed = print_description(d);
        EXPECT_EQ(printed.find('{'), std::string::npos) << printed;
        EXPECT_EQ(parse_description(printed), d) << s;
    }
    EXPECT_EQ(print_description(parse_description("horizontal pipe on red floodgate")),
              "horizontal pipe on red floodgate[hunt]");
}

TEST(Print, StructuredFallback) {
    const auto d = parse_description("object a: pipe and not red [hunt]");
    EXPECT_EQ(print_description(d), "{\n  object a: pipe and not red [hunt]\n}");
}

TEST(Print, RoundTripProperty) {
    Rng rng(20240611);
    for (int i = 0; i < 500; ++i) {
        const auto d = random_description(rng);
        ASSERT_TRUE(validate_description(d).empty()) << print_description(d);
        const auto text = print_description(d);
        const auto back = parse_description(text);
        ASSERT_EQ(back, d) << text;
        ASSERT_EQ(print_description(back), text);
    }
}
