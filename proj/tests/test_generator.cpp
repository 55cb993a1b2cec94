#include <gtest/gtest.h>

#include "support.hpp"

using namespace scenematch;
using namespace testsupport;

TEST(Generator, SameSeedSameScene) {
    GenSpec g;
    g.seed = 123;
    g.degradation = 0.3;
    g.false_rate = 0.5;
    g.hidden_rate = 0.5;
    const auto a = generate_case(g);
    const auto b = generate_case(g);
    EXPECT_EQ(save_scene(a.scene), save_scene(b.scene));
    EXPECT_EQ(a.ground_truth, b.ground_truth);
    g.seed = 124;
    EXPECT_NE(save_scene(generate_case(g).scene), save_scene(a.scene));
}

TEST(Generator, NoiselessGroundTruthScoresOne) {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        GenSpec g;
        g.seed = seed;
        const auto c = generate_case(g);
        ASSERT_EQ(c.ground_truth.size(), 3u);
        const auto h = score_hypothesis(c.description.alternatives[0], 0, c.ground_truth, c.scene, {}, Aggregator::Min);
        EXPECT_EQ(h.likelihood, Possibility::one()) << "seed " << seed;
    }
}

TEST(Generator, SceneIsValidAndSized) {
    GenSpec g;
    g.seed = 9;
    g.objects = 4;
    const auto c = generate_case(g);
    EXPECT_EQ(c.scene.objects.size(), 7u);
    EXPECT_NO_THROW(check_scene(c.scene));
    EXPECT_EQ(load_scene(save_scene(c.scene)), c.scene);
    EXPECT_EQ(print_description(c.description), c.description_text);
}

TEST(Generator, RatesValidated) {
    GenSpec g;
    g.false_rate = 1.5;
    EXPECT_THROW(generate_case(g), RangeError);
    g.false_rate = 0;
    g.hidden_rate = -0.1;
    EXPECT_THROW(generate_case(g), RangeError);
}

TEST(Generator, DescriptionCarriesTwoColourItems) {
    const auto items = description_items(parse_description(kGeneratedDescription).alternatives[0]);
    const auto colours = std::count_if(items.begin(), items.end(), [](const DescriptionItem& it) {
        return it.label == "o1.blue" || it.label == "o2.grey";
    });
    EXPECT_EQ(colours, 2);
}
