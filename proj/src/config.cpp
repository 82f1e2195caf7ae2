#include "psa/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace psa {

using nlohmann::json;

void TargetConfig::validate() const {
    pyramid.validate();
    thresholds.validate();
    oks.validate();
    if (strategy == MatchStrategy::Pose && task != Task::Pose) {
        throw Error(ErrorKind::InvalidConfig, "pose matching needs the pose task");
    }
    if (num_modes == 0) throw Error(ErrorKind::InvalidConfig, "num_modes must be at least 1");
    if (!(coverage_threshold >= 0.0 && coverage_threshold <= 1.0)) {
        throw Error(ErrorKind::InvalidConfig, "coverage_threshold must lie in [0, 1]");
    }
}

TargetConfig default_config(Task task) {
    TargetConfig c;
    c.task = task;
    if (task == Task::Pose) {
        c.strategy = MatchStrategy::Pose;
        c.thresholds = Thresholds::pose_stage1();
    }
    return c;
}

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& what) {
    throw Error(ErrorKind::InvalidConfig, "config." + key + ": " + what);
}

std::vector<double> number_list(const json& v, const std::string& key) {
    if (!v.is_array()) bad(key, "expected a list of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) bad(key, "expected a list of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

double number(const json& v, const std::string& key) {
    if (!v.is_number()) bad(key, "expected a number");
    return v.get<double>();
}

Task parse_task(const json& v) {
    const auto s = v.is_string() ? v.get<std::string>() : std::string{};
    if (s == "segmentation" || s == "mask") return Task::Segmentation;
    if (s == "pose") return Task::Pose;
    bad("task", "expected \"segmentation\" or \"pose\"");
}

}  // namespace

TargetConfig parse_config(const std::string& text, std::optional<Task> task,
                          const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::InvalidConfig, std::string("config: ") + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorKind::InvalidConfig, "config: expected a JSON object");

    static const std::set<std::string> known = {
        "task",          "levels",     "octave_scales", "aspect_ratios", "pose_scales",
        "pose_rotations", "num_points", "strategy",      "thresholds",    "force_nearest",
        "oks",           "modes",      "num_modes",     "seed",          "coverage_threshold"};
    for (const auto& [key, value] : doc.items()) {
        if (!known.count(key)) bad(key, "unknown key");
    }

    if (!task) task = doc.contains("task") ? parse_task(doc["task"]) : Task::Segmentation;
    TargetConfig c = default_config(*task);

    if (doc.contains("levels")) {
        const auto& lv = doc["levels"];
        if (!lv.is_array()) bad("levels", "expected a list of {stride, base_scale}");
        c.pyramid.levels.clear();
        for (std::size_t i = 0; i < lv.size(); ++i) {
            const std::string key = "levels[" + std::to_string(i) + "]";
            if (!lv[i].is_object() || !lv[i].contains("stride") || !lv[i].contains("base_scale")) {
                bad(key, "expected {stride, base_scale}");
            }
            c.pyramid.levels.push_back(
                {number(lv[i]["stride"], key + ".stride"),
                 number(lv[i]["base_scale"], key + ".base_scale")});
        }
    }
    if (doc.contains("octave_scales")) {
        c.pyramid.octave_scales = number_list(doc["octave_scales"], "octave_scales");
    }
    if (doc.contains("aspect_ratios")) {
        c.pyramid.aspect_ratios = number_list(doc["aspect_ratios"], "aspect_ratios");
    }
    if (doc.contains("pose_scales")) {
        c.pyramid.pose_scales = number_list(doc["pose_scales"], "pose_scales");
    }
    if (doc.contains("pose_rotations")) {
        c.pyramid.pose_rotations_deg = number_list(doc["pose_rotations"], "pose_rotations");
    }
    if (doc.contains("num_points")) {
        if (!doc["num_points"].is_number_unsigned()) bad("num_points", "expected a count");
        c.pyramid.num_points = doc["num_points"].get<std::size_t>();
    }
    if (doc.contains("strategy")) {
        const auto& v = doc["strategy"];
        const auto s = v.is_string() ? v.get<std::string>() : std::string{};
        if (s == "pose") {
            c.strategy = MatchStrategy::Pose;
        } else if (auto m = parse_mask_strategy(s)) {
            c.strategy = *m;
        } else {
            bad("strategy", "unknown strategy \"" + s + "\"");
        }
    }
    if (doc.contains("thresholds")) {
        const auto& v = doc["thresholds"];
        if (v.is_string()) {
            auto t = Thresholds::preset(v.get<std::string>());
            if (!t) bad("thresholds", "unknown preset \"" + v.get<std::string>() + "\"");
            c.thresholds = *t;
        } else if (v.is_object() && v.contains("hi") && v.contains("lo")) {
            c.thresholds = {number(v["hi"], "thresholds.hi"), number(v["lo"], "thresholds.lo")};
        } else {
            bad("thresholds", "expected {hi, lo} or a preset name");
        }
    }
    if (doc.contains("force_nearest")) {
        if (!doc["force_nearest"].is_boolean()) bad("force_nearest", "expected a boolean");
        c.force_nearest = doc["force_nearest"].get<bool>();
    }
    if (doc.contains("oks")) {
        const auto& v = doc["oks"];
        if (!v.is_object()) bad("oks", "expected an object");
        if (v.contains("kappas")) {
            const auto k = number_list(v["kappas"], "oks.kappas");
            if (k.size() != kNumJoints) bad("oks.kappas", "expected 17 values");
            std::copy(k.begin(), k.end(), c.oks.kappas.begin());
        }
        if (v.contains("scale_source")) {
            const auto s = v["scale_source"].is_string() ? v["scale_source"].get<std::string>()
                                                         : std::string{};
            if (s == "box") {
                c.oks.scale_source = OksScaleSource::BoxArea;
            } else if (s == "segment") {
                c.oks.scale_source = OksScaleSource::SegmentArea;
            } else {
                bad("oks.scale_source", "expected \"box\" or \"segment\"");
            }
        }
    }
    if (doc.contains("modes")) {
        if (!doc["modes"].is_string()) bad("modes", "expected a path");
        std::filesystem::path p = doc["modes"].get<std::string>();
        c.modes_path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
    if (doc.contains("num_modes")) {
        if (!doc["num_modes"].is_number_unsigned()) bad("num_modes", "expected a count");
        c.num_modes = doc["num_modes"].get<std::size_t>();
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) bad("seed", "expected a non-negative integer");
        c.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("coverage_threshold")) {
        c.coverage_threshold = number(doc["coverage_threshold"], "coverage_threshold");
    }
    if (c.task == Task::Pose) {
        c.strategy = MatchStrategy::Pose;
    } else if (c.strategy == MatchStrategy::Pose) {
        bad("strategy", "pose matching needs the pose task");
    }
    c.validate();
    return c;
}

TargetConfig load_config(const std::filesystem::path& path, std::optional<Task> task) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::FileNotFound, path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), task, path.parent_path());
}

std::string config_to_json(const TargetConfig& c) {
    nlohmann::ordered_json doc;
    doc["task"] = std::string(to_string(c.task));
    auto levels = nlohmann::ordered_json::array();
    for (const auto& l : c.pyramid.levels) {
        levels.push_back({{"stride", l.stride}, {"base_scale", l.base_scale}});
    }
    doc["levels"] = levels;
    doc["octave_scales"] = c.pyramid.octave_scales;
    doc["aspect_ratios"] = c.pyramid.aspect_ratios;
    doc["pose_scales"] = c.pyramid.pose_scales;
    doc["pose_rotations"] = c.pyramid.pose_rotations_deg;
    doc["num_points"] = c.pyramid.num_points;
    doc["strategy"] = std::string(to_string(c.strategy));
    doc["thresholds"] = {{"hi", c.thresholds.hi}, {"lo", c.thresholds.lo}};
    doc["force_nearest"] = c.force_nearest;
    doc["oks"] = {{"kappas", c.oks.kappas},
                  {"scale_source",
                   c.oks.scale_source == OksScaleSource::BoxArea ? "box" : "segment"}};
    if (c.modes_path) doc["modes"] = c.modes_path->string();
    doc["num_modes"] = c.num_modes;
    doc["seed"] = c.seed;
    doc["coverage_threshold"] = c.coverage_threshold;
    return doc.dump(2) + "\n";
}

}  // namespace psa
