#pragma once

// Seeded synthetic pipe-graph scenes with a known ground-truth binding.
//
// Each scene contains one true path: a vertical pipe meeting a horizontal
// pipe at a corner (elbow), with a red floodgate on the horizontal pipe. The
// matching description names the path with two redundant colour items.
// Noise knobs:
//   degradation  lowers detection confidences of the true objects
//   false_rate   chance of each decoy path fragment (shadow objects)
//   hidden_rate  chance that each colour cue of the true path is lost

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "scenematch/description.hpp"
#include "scenematch/parser.hpp"
#include "scenematch/scene.hpp"

namespace scenematch {

struct GenSpec {
    std::uint64_t seed = 1;
    std::size_t objects = 10;  // distractors besides the true path
    double degradation = 0.0;
    double false_rate = 0.0;
    double hidden_rate = 0.0;

    void validate() const {
        auto rate = [](double r, const char* what) {
            if (!(r >= 0.0 && r <= 1.0)) throw RangeError(std::string(what) + " must lie in [0,1]");
        };
        rate(degradation, "degradation");
        rate(false_rate, "false-percept rate");
        rate(hidden_rate, "hidden-object rate");
    }
};

struct GeneratedCase {
    Scene scene;
    std::string description_text;
    Description description;
    std::map<std::string, std::string> ground_truth;  // expected id -> perceived id
};

inline constexpr const char* kGeneratedDescription =
    "blue vertical elongated pipe elbow grey horizontal pipe on red floodgate[hunt]";

namespace detail {

// Draws built directly on the engine's output so that a seed gives the same
// scene with every standard library.
class SeededDraw {
public:
    explicit SeededDraw(std::uint64_t seed) : engine_(seed) {}

    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
    double pixel(double lo, double hi) { return std::round(uniform(lo, hi)); }
    double degree(double lo, double hi) { return std::round(uniform(lo, hi) * 100) / 100; }
    bool chance(double p) { return unit() < p; }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(unit() * static_cast<double>(n)); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(i)]);
    }

private:
    std::mt19937_64 engine_;
};

struct PathBoxes {
    BoundingBox vertical, horizontal, floodgate;
};

inline PathBoxes draw_path(SeededDraw& rng) {
    const double x0 = rng.pixel(30, 330);
    const double vw = rng.pixel(10, 20);
    const double top = rng.pixel(40, 180);
    const double vlen = rng.pixel(160, 260);
    const double hthick = rng.pixel(10, 18);
    const double hlen = rng.pixel(120, 220);
    const double hx0 = x0 + vw - 2;
    const BoundingBox vertical(x0, x0 + vw, top, top + vlen);
    const BoundingBox horizontal(hx0, hx0 + hlen, top - 2, top - 2 + hthick);
    const double fw = rng.pixel(8, 30);
    const double fx = rng.pixel(hx0 + 20, hx0 + hlen - fw - 5);
    const double fy = top - 2 + rng.pixel(0, 3);
    const BoundingBox floodgate(fx, fx + fw, fy, fy + rng.pixel(8, 20));
    return {vertical, horizontal, floodgate};
}

inline PerceivedObject make_object(std::string type, Possibility conf, BoundingBox box,
                                   std::map<std::string, Possibility> colors) {
    PerceivedObject o;
    o.detected_type = std::move(type);
    o.detection_confidence = conf;
    o.bbox = box;
    o.color_degrees = std::move(colors);
    return o;
}

} // namespace detail

inline GeneratedCase generate_case(const GenSpec& spec) {
    spec.validate();
    detail::SeededDraw rng(spec.seed);
    const auto path = detail::draw_path(rng);

    auto true_conf = [&] { return Possibility(std::max(0.0, 1.0 - rng.degree(0.0, spec.degradation))); };
    auto cue = [&] { return rng.chance(spec.hidden_rate) ? Possibility(rng.degree(0.0, 0.3)) : Possibility::one(); };

    std::vector<std::pair<std::string, PerceivedObject>> tagged;
    tagged.emplace_back("o1", detail::make_object("pipe", true_conf(), path.vertical, {{"blue", cue()}}));
    tagged.emplace_back("o2", detail::make_object("pipe", true_conf(), path.horizontal, {{"grey", cue()}}));
    tagged.emplace_back("o3", detail::make_object("floodgate", true_conf(), path.floodgate, {{"red", Possibility::one()}}));

    const auto colors = color_names();
    for (std::size_t i = 0; i < spec.objects; ++i) {
        const bool pipe = rng.chance(0.6);
        const bool upright = rng.chance(0.5);
        double w, h;
        if (pipe) {
            const double len = rng.pixel(60, 260), thick = rng.pixel(6, 20);
            w = upright ? thick : len;
            h = upright ? len : thick;
        } else {
            w = rng.pixel(8, 40);
            h = rng.pixel(8, 40);
        }
        const double x = rng.pixel(0, 640 - w), y = rng.pixel(0, 480 - h);
        std::map<std::string, Possibility> c{{colors[rng.index(colors.size())], Possibility(rng.degree(0.5, 1.0))}};
        tagged.emplace_back("", detail::make_object(pipe ? "pipe" : "floodgate", Possibility(rng.degree(0.3, 1.0)),
                                                    BoundingBox(x, x + w, y, y + h), std::move(c)));
    }

    // Decoy fragments of the path: a shadow floodgate on a shadow pipe, and
    // a shadow corner pipe. They share the path's look but not all of it.
    if (rng.chance(spec.false_rate)) {
        const auto decoy = detail::draw_path(rng);
        tagged.emplace_back("", detail::make_object("pipe", Possibility(rng.degree(0.6, 1.0)), decoy.horizontal,
                                                    {{"grey", Possibility(rng.degree(0.0, 1.0))}}));
        tagged.emplace_back("", detail::make_object("floodgate", Possibility(rng.degree(0.6, 1.0)), decoy.floodgate,
                                                    {{"red", Possibility(rng.degree(0.6, 1.0))}}));
        if (rng.chance(spec.false_rate)) {
            tagged.emplace_back("", detail::make_object("pipe", Possibility(rng.degree(0.4, 1.0)), decoy.vertical,
                                                        {{"blue", Possibility(rng.degree(0.0, 0.6))}}));
        }
    }

    rng.shuffle(tagged);
    GeneratedCase out;
    for (std::size_t i = 0; i < tagged.size(); ++i) {
        auto& [role, obj] = tagged[i];
        obj.id = "P" + std::to_string(i + 1);
        if (!role.empty()) out.ground_truth[role] = obj.id;
        out.scene.objects.push_back(std::move(obj));
    }
    check_scene(out.scene);
    out.description_text = kGeneratedDescription;
    out.description = parse_description(out.description_text);
    return out;
}

} // namespace scenematch
