#include "psa/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "psa/config.hpp"
#include "psa/coverage.hpp"
#include "psa/dataset.hpp"
#include "psa/posemodes.hpp"
#include "psa/targets.hpp"

namespace psa {

namespace {

struct CommonOptions {
    std::string config;
    std::string strategy;
    std::string similarity;
    std::vector<std::size_t> k;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string input;
};

void add_common(CLI::App& cmd, CommonOptions& o, bool needs_input) {
    cmd.add_option("--config", o.config, "Config document (JSON)")->check(CLI::ExistingFile);
    cmd.add_option("--strategy", o.strategy, "Mask matching strategy")
        ->check(CLI::IsMember({"nearest-point", "nearest-line", "corner-projection"}));
    cmd.add_option("--similarity", o.similarity, "Anchor/gt similarity")
        ->check(CLI::IsMember({"iou", "oks"}));
    cmd.add_option("--k", o.k, "Number of pose modes (comma separated for coverage)")
        ->delimiter(',');
    cmd.add_option("--seed", o.seed, "Random seed");
    cmd.add_option("--out", o.out, "Output path");
    if (needs_input) {
        cmd.add_option("input,--input", o.input, "COCO-style annotation document")
            ->required()
            ->check(CLI::ExistingFile);
    }
}

ParseResult read_input(const std::string& path, std::ostream& err) {
    ParseResult parsed = parse_annotations(path);
    for (const auto& w : parsed.warnings) err << "warning: " << w << '\n';
    if (parsed.rle_rejected) {
        err << "warning: " << parsed.rle_rejected << " RLE/crowd annotation(s) rejected\n";
    }
    return parsed;
}

bool has_keypoints(const std::vector<InstanceRecord>& records) {
    return std::any_of(records.begin(), records.end(),
                       [](const InstanceRecord& r) { return r.keypoints.has_value(); });
}

bool config_names_task(const std::string& path) {
    if (path.empty()) return false;
    std::ifstream f(path, std::ios::binary);
    const auto doc = nlohmann::json::parse(f, nullptr, false);
    return doc.is_object() && doc.contains("task");
}

TargetConfig resolve_config(const CommonOptions& o, const std::vector<InstanceRecord>& records) {
    std::optional<Task> task;
    if (o.similarity == "iou") task = Task::Segmentation;
    if (o.similarity == "oks") task = Task::Pose;
    if (!task && !config_names_task(o.config)) {
        task = has_keypoints(records) ? Task::Pose : Task::Segmentation;
    }
    TargetConfig c = o.config.empty() ? default_config(*task) : load_config(o.config, task);
    if (!o.strategy.empty()) {
        if (c.task == Task::Pose) {
            throw Error(ErrorKind::InvalidArgument, "--strategy applies to mask targets only");
        }
        c.strategy = *parse_mask_strategy(o.strategy);
    }
    if (o.seed) c.seed = *o.seed;
    c.validate();
    return c;
}

std::size_t single_k(const CommonOptions& o, std::size_t fallback) {
    if (o.k.empty()) return fallback;
    if (o.k.size() > 1) throw Error(ErrorKind::InvalidArgument, "--k takes a single value here");
    return o.k.front();
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::Io, "cannot write " + path);
    return f;
}

void check_written(std::ostream& f, const std::string& path) {
    f.flush();
    if (!f) throw Error(ErrorKind::Io, "failed writing " + path);
}

void run_targets(const CommonOptions& o, std::ostream& out, std::ostream& err) {
    const auto parsed = read_input(o.input, err);
    TargetConfig c = resolve_config(o, parsed.records);
    c.num_modes = single_k(o, c.num_modes);
    TargetSummary summary;
    if (o.out.empty()) {
        summary = emit_targets(parsed.records, c, out);
        err << summary_to_json(summary);
    } else {
        auto f = open_out(o.out);
        summary = emit_targets(parsed.records, c, f);
        check_written(f, o.out);
        out << summary_to_json(summary);
    }
}

void run_coverage(const CommonOptions& o, std::optional<double> threshold, std::ostream& out,
                  std::ostream& err) {
    const auto parsed = read_input(o.input, err);
    const TargetConfig c = resolve_config(o, parsed.records);
    const Similarity sim = c.task == Task::Pose ? Similarity::Oks : Similarity::Iou;
    const double thr = threshold.value_or(c.coverage_threshold);

    std::vector<AnchorSetConfig> configs;
    if (sim == Similarity::Oks) {
        std::vector<std::size_t> ks = o.k.empty() ? std::vector<std::size_t>{3, 5} : o.k;
        configs = default_pose_coverage_configs(parsed.records, c.pyramid, ks, c.seed);
        if (c.modes_path) {
            configs.push_back({"modes-file", c.pyramid, load_pose_modes(*c.modes_path).modes});
        }
    } else {
        configs = default_mask_coverage_configs(c.pyramid);
    }
    const auto reports = coverage_report(parsed.records, configs, sim, thr, c.oks,
                                         c.thresholds.lo);
    out << format_coverage_table(reports);
    if (!o.out.empty()) {
        auto f = open_out(o.out);
        f << coverage_to_json(reports);
        check_written(f, o.out);
    }
}

void run_modes(const CommonOptions& o, std::ostream& out, std::ostream& err) {
    const auto parsed = read_input(o.input, err);
    std::uint64_t seed = 0;
    std::size_t k = 3;
    if (!o.config.empty()) {
        const auto c = load_config(o.config, Task::Pose);
        seed = c.seed;
        k = c.num_modes;
    }
    if (o.seed) seed = *o.seed;
    k = single_k(o, k);
    const auto modes = cluster_record_poses(parsed.records, k, seed);
    const std::string doc = pose_modes_to_json(modes);
    if (o.out.empty()) {
        out << doc;
    } else {
        auto f = open_out(o.out);
        f << doc;
        check_written(f, o.out);
        out << "k=" << modes.modes.size() << " admitted=" << modes.admitted
            << " iterations=" << modes.iterations << " inertia=" << format_number(modes.inertia)
            << '\n';
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Point-set anchor targets, coverage reports and pose modes", "psanchor"};
    app.require_subcommand(1);

    CommonOptions targets_opt;
    auto* targets = app.add_subcommand("targets", "Emit per-anchor training targets");
    add_common(*targets, targets_opt, true);

    CommonOptions coverage_opt;
    std::optional<double> threshold;
    auto* coverage = app.add_subcommand("coverage", "Report how well anchor layouts cover gts");
    add_common(*coverage, coverage_opt, true);
    coverage->add_option("--threshold", threshold, "Similarity counted as matched")
        ->check(CLI::Range(0.0, 1.0));

    CommonOptions modes_opt;
    auto* modes = app.add_subcommand("modes", "Cluster normalized poses into pose modes");
    add_common(*modes, modes_opt, true);

    CommonOptions synth_opt;
    SynthParams synth_params;
    std::string kind = "contours";
    std::size_t image_size = synth_params.image_width;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic COCO-style corpus");
    add_common(*synth, synth_opt, false);
    synth->add_option("--kind", kind, "contours or poses")
        ->check(CLI::IsMember({"contours", "poses"}));
    synth->add_option("--count", synth_params.count, "Number of instances")
        ->check(CLI::PositiveNumber);
    synth->add_option("--image-size", image_size, "Square image side in pixels")
        ->check(CLI::PositiveNumber);
    synth->add_option("--per-image", synth_params.instances_per_image, "Instances per image")
        ->check(CLI::PositiveNumber);
    synth->add_flag("--convex-only", synth_params.convex_only, "Emit convex polygons only");
    synth->add_option("--jitter", synth_params.jitter, "Joint noise, fraction of height")
        ->check(CLI::NonNegativeNumber);
    synth->add_option("--dropout", synth_params.dropout, "Joint dropout probability")
        ->check(CLI::Range(0.0, 1.0));
    synth->add_option("--articulation", synth_params.articulation, "Body pose variety, 0..1")
        ->check(CLI::Range(0.0, 1.0));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    try {
        if (*targets) {
            run_targets(targets_opt, out, err);
        } else if (*coverage) {
            run_coverage(coverage_opt, threshold, out, err);
        } else if (*modes) {
            run_modes(modes_opt, out, err);
        } else if (*synth) {
            synth_params.kind = kind == "poses" ? SynthKind::Poses : SynthKind::Contours;
            synth_params.seed = synth_opt.seed.value_or(0);
            synth_params.image_width = synth_params.image_height = image_size;
            const auto records = generate_synthetic_corpus(synth_params);
            if (synth_opt.out.empty()) {
                out << records_to_coco_json(records);
            } else {
                write_coco(records, synth_opt.out);
                out << records.size() << " instances written to " << synth_opt.out << '\n';
            }
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace psa
