#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "scenematch/scenematch.hpp"

using namespace scenematch;

namespace {

struct Config {
    std::string scene_path;
    std::string desc_path;
    std::string desc_text;
    double min_likelihood = 0.6;
    double min_ambiguity = 0.3;
    std::string aggregator = "min";
    std::string scope = "full";
    std::string params_path;
    std::string format = "text";
    bool strict = false;
    bool verbose = false;
};

struct InputError : Error {
    using Error::Error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << text;
}

Description load_description(const Config& c) {
    if (!c.desc_text.empty()) return parse_description(c.desc_text);
    if (c.desc_path.empty()) throw InputError("a description is required (--desc or --desc-text)");
    return parse_description(read_file(c.desc_path));
}

Scene load_scene_file(const Config& c) {
    if (c.scene_path.empty()) throw InputError("--scene is required");
    return load_scene(read_file(c.scene_path));
}

MembershipParams load_params(const Config& c) {
    if (c.params_path.empty()) return {};
    try {
        return params_from_json(nlohmann::json::parse(read_file(c.params_path)));
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed parameter document: ") + e.what());
    }
}

void check_unit(double v, const char* flag) {
    if (!(v >= 0.0 && v <= 1.0)) throw RangeError(std::string(flag) + " must lie in [0,1]");
}

void print_notes(const std::set<std::string>& notes) {
    for (const auto& n : notes) std::cerr << "note: " << n << "\n";
}

int cmd_match(const Config& c) {
    check_unit(c.min_likelihood, "--min-likelihood");
    const auto d = load_description(c);
    const auto scene = load_scene_file(c);
    std::set<std::string> notes;
    MatchOptions opts;
    opts.aggregator = c.aggregator == "geomean" ? Aggregator::GeoMean : Aggregator::Min;
    opts.min_likelihood = c.min_likelihood;
    opts.eval = {c.strict, &notes};
    const auto rs = enumerate_hypotheses(d, scene, load_params(c), opts);
    if (c.format == "json") {
        std::cout << recognized_to_json(d, rs, notes).dump(2) << "\n";
    } else {
        std::cout << format_recognized(d, rs);
        if (!rs.hypotheses.empty()) std::cout << "non-ambiguity " << format_degree(non_ambiguity(rs)) << "\n";
        print_notes(notes);
    }
    return rs.hypotheses.empty() ? 1 : 0;
}

int cmd_redundancy(const Config& c) {
    const PerformanceThreshold th{c.min_likelihood, c.min_ambiguity};
    th.validate();
    const auto d = load_description(c);
    const auto scene = load_scene_file(c);
    std::set<std::string> notes;
    RedundancyOptions opts;
    opts.scope = c.scope == "subd" ? AmbiguityScope::MaximalSubd : AmbiguityScope::FullDescription;
    opts.eval = {c.strict, &notes};
    const auto r = redundancy_report(d, scene, load_params(c), th, opts);
    if (c.format == "json") {
        auto j = report_to_json(d, r, c.verbose);
        j["notes"] = std::vector<std::string>(notes.begin(), notes.end());
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << format_report(d, r, c.verbose);
        print_notes(notes);
    }
    return r.matched ? 0 : 1;
}

int cmd_parse(const Config& c) {
    const auto d = load_description(c);
    if (c.format == "json") {
        std::cout << description_to_json(d).dump(2) << "\n";
    } else {
        std::cout << print_description(d) << "\n";
        if (c.verbose) std::cout << description_to_json(d)["alternatives"].dump(2) << "\n";
    }
    return 0;
}

int cmd_gen(const GenSpec& spec, const std::string& scene_out, const std::string& desc_out) {
    const auto g = generate_case(spec);
    if (!scene_out.empty()) write_file(scene_out, save_scene(g.scene) + "\n");
    if (!desc_out.empty()) write_file(desc_out, g.description_text + "\n");
    nlohmann::ordered_json doc;
    doc["seed"] = spec.seed;
    doc["description"] = g.description_text;
    doc["ground_truth"] = g.ground_truth;
    doc["scene"] = scene_to_json(g.scene);
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_params(const Config& c) {
    std::cout << params_to_json(load_params(c)).dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fuzzy matching of symbolic scene descriptions against perceived scenes"};
    app.require_subcommand(1);
    Config cfg;
    GenSpec gen;
    std::string scene_out, desc_out;

    auto add_description = [&](CLI::App* sub) {
        auto* path = sub->add_option("--desc", cfg.desc_path, "Description file");
        sub->add_option("--desc-text", cfg.desc_text, "Inline description text")->excludes(path);
    };
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scene", cfg.scene_path, "Scene document (JSON)");
        add_description(sub);
        sub->add_option("--min-likelihood", cfg.min_likelihood, "Likelihood threshold")->capture_default_str();
        sub->add_option("--params", cfg.params_path, "Membership parameter document");
        sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"text", "json"}));
        sub->add_flag("--strict", cfg.strict, "Fail on relations the geometry cannot decide");
        sub->add_flag("-v,--verbose", cfg.verbose, "Verbose output");
    };

    auto* match = app.add_subcommand("match", "Rank hypotheses for a description");
    add_common(match);
    match->add_option("--aggregator", cfg.aggregator, "Item aggregator")->check(CLI::IsMember({"min", "geomean"}));

    auto* red = app.add_subcommand("redundancy", "Sub-description lattice, kernel and redundancy report");
    add_common(red);
    red->add_option("--min-ambiguity", cfg.min_ambiguity, "Non-ambiguity threshold")->capture_default_str();
    red->add_option("--ambiguity-scope", cfg.scope, "Non-ambiguity scope for the final performance")
        ->check(CLI::IsMember({"full", "subd"}));

    auto* parse = app.add_subcommand("parse", "Parse and print a description");
    add_description(parse);
    parse->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"text", "json"}));
    parse->add_flag("-v,--verbose", cfg.verbose, "Also print the structure");

    auto* gensub = app.add_subcommand("gen", "Generate a seeded synthetic scene");
    gensub->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
    gensub->add_option("--objects", gen.objects, "Distractor count")->capture_default_str();
    gensub->add_option("--degradation", gen.degradation, "Confidence degradation")->capture_default_str();
    gensub->add_option("--false-rate", gen.false_rate, "False-percept rate")->capture_default_str();
    gensub->add_option("--hidden-rate", gen.hidden_rate, "Hidden-cue rate")->capture_default_str();
    gensub->add_option("--scene-out", scene_out, "Write the scene document here");
    gensub->add_option("--desc-out", desc_out, "Write the description here");

    auto* params = app.add_subcommand("params", "Print membership parameters");
    params->add_option("--params", cfg.params_path, "Parameter document to validate and print");
    params->add_flag("--dump", "Print the defaults (the default action)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*match) return cmd_match(cfg);
        if (*red) return cmd_redundancy(cfg);
        if (*parse) return cmd_parse(cfg);
        if (*gensub) return cmd_gen(gen, scene_out, desc_out);
        if (*params) return cmd_params(cfg);
    } catch (const ParseError& e) {
        std::cerr << "description error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return 2;
}
