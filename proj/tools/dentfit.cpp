// dentfit: synthesise, segment and fit dents in scanned skin point clouds.
//
// Exit codes: 0 success with at least one dent, 2 success with none, 1 error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dentfit/cloud.hpp"
#include "dentfit/errors.hpp"
#include "dentfit/heatmap.hpp"
#include "dentfit/height_field.hpp"
#include "dentfit/pipeline.hpp"
#include "dentfit/report.hpp"
#include "dentfit/srm.hpp"
#include "dentfit/synth.hpp"

namespace fs = std::filesystem;
using namespace dentfit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNoDents = 2;

struct ParamFlags {
    std::string example;
    DentParams params{30.0, 30.0, 5.0, kEuler, 1.0, 0.0, 0.0};
    Pose pose;
};

struct PipelineFlags {
    std::string input;
    std::string plane = "ransac";
    std::string mode = "full7";
    PipelineConfig config;
    std::string out;
    std::string heatmap;
    std::string segments_out;
    double scale = 1.0;
    double pitch = 0.5;
    bool allow_empty = false;
};

void add_param_flags(CLI::App* cmd, ParamFlags& f) {
    cmd->add_option("--example", f.example, "Gallery shape by name or 1-based index (overrides shape flags)");
    cmd->add_option("--l", f.params.l, "Length along the dent x-axis (mm)");
    cmd->add_option("--w", f.params.w, "Width along the dent y-axis (mm)");
    cmd->add_option("--d", f.params.d, "Maximum depth (mm)");
    cmd->add_option("--b", f.params.b, "Exponential base, > 1");
    cmd->add_option("--p", f.params.p, "Egg-factor in (0, 2)");
    cmd->add_option("--sx", f.params.s_x, "Deepest-point shift along x, fraction of l");
    cmd->add_option("--sy", f.params.s_y, "Deepest-point shift along y, fraction of w");
    cmd->add_option("--cx", f.pose.c_x, "Dent centre x (mm)");
    cmd->add_option("--cy", f.pose.c_y, "Dent centre y (mm)");
    cmd->add_option("--theta", f.pose.theta, "In-plane rotation (radians)");
}

DentParams resolve_params(const ParamFlags& f) {
    if (f.example.empty()) return f.params;
    const auto& gallery = example_gallery();
    for (std::size_t i = 0; i < gallery.size(); ++i) {
        if (gallery[i].name == f.example || std::to_string(i + 1) == f.example) return gallery[i].params;
    }
    std::string names;
    for (const auto& g : gallery) names += " " + g.name;
    throw DomainError("unknown example '" + f.example + "'; choose 1-8 or one of:" + names);
}

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& f) {
    cmd->add_option("--input,-i", f.input, "Input cloud (.xyz or ascii .ply)")->required();
    cmd->add_option("--plane", f.plane, "Base plane estimator")->check(CLI::IsMember({"lsq", "ransac"}));
    cmd->add_option("--inlier-tol", f.config.inlier_tol, "RANSAC inlier distance (mm)");
    cmd->add_option("--ransac-iterations", f.config.ransac_iterations, "RANSAC samples");
    cmd->add_option("--seed", f.config.seed, "Seed for RANSAC and multistart perturbations");
    cmd->add_option("--depth-threshold", f.config.segmentation.depth_threshold, "Segmentation depth (mm)");
    cmd->add_option("--cell", f.config.segmentation.cell, "Segmentation cell size (mm)");
    cmd->add_option("--min-points", f.config.segmentation.min_points, "Minimum below-threshold points per dent");
    cmd->add_option("--mode", f.mode, "Model variant")->check(CLI::IsMember({"full7", "simplified3"}));
    cmd->add_option("--multistart", f.config.fit.multistart, "Optimiser starts per fit");
    cmd->add_option("--max-evals", f.config.fit.max_evaluations, "Objective evaluations per start");
    cmd->add_option("--tolerance", f.config.fit.tolerance, "Objective spread tolerance (mm^2 per point)");
    cmd->add_option("--ring-width", f.config.fit.ring_width, "Flat anchor ring width (mm)");
    cmd->add_option("--out,-o", f.out, "Output JSON path (stdout when omitted)");
    cmd->add_flag("--allow-empty", f.allow_empty, "Write [] when no dent is found");
}

PipelineConfig finalize(PipelineFlags& f) {
    f.config.plane = parse_plane_method(f.plane);
    f.config.fit.mode = parse_fit_mode(f.mode);
    f.config.fit.seed = f.config.seed;
    validate(f.config.fit);
    return f.config;
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        std::cout.flush();
    } else {
        write_file_atomic(path, content);
    }
}

fs::path indexed_path(const fs::path& base, std::size_t index) {
    if (index == 0) return base;
    auto p = base;
    p.replace_filename(base.stem().string() + "_" + std::to_string(index) + base.extension().string());
    return p;
}

void write_segments(const fs::path& path, const PreparedCloud& prepared) {
    std::ostringstream out;
    out << "# dent segments in the base-plane frame: x y h segment\n";
    char buf[96];
    for (std::size_t s = 0; s < prepared.segments.size(); ++s) {
        for (const auto& p : prepared.segments[s].points) {
            std::snprintf(buf, sizeof buf, "%.12g %.12g %.12g %zu\n", p.x, p.y, p.h, s);
            out << buf;
        }
    }
    write_file_atomic(path, out.str());
}

PreparedCloud load_and_prepare(PipelineFlags& f, const PipelineConfig& config) {
    const PointCloud cloud = read_cloud_file(f.input);
    PreparedCloud prepared = prepare_cloud(cloud, config);
    for (std::size_t i = 0; i < prepared.segments.size(); ++i) {
        if (prepared.segments[i].multimodal) {
            std::cerr << "warning: segment " << i
                      << " has several separated deep basins (overlapping dents?); fitted as one dent\n";
        }
    }
    if (!f.segments_out.empty()) write_segments(f.segments_out, prepared);
    return prepared;
}

int no_dents(const PipelineFlags& f) {
    std::cerr << "no dents found in '" << f.input << "' (depth threshold "
              << f.config.segmentation.depth_threshold << " mm)\n";
    if (f.allow_empty) emit(f.out, "[]\n");
    return kExitNoDents;
}

int run_synth(const ParamFlags& pf, const SynthConfig& sc, const std::string& out, const std::string& hf,
              double hf_spacing) {
    const PlacedDent dent{resolve_params(pf), pf.pose};
    validate(dent.params);
    const PointCloud cloud = synthesize_cloud(std::span<const PlacedDent>(&dent, 1), sc);
    std::ostringstream text;
    text << "# synthetic dent l=" << dent.params.l << " w=" << dent.params.w << " d=" << dent.params.d
         << " b=" << dent.params.b << " p=" << dent.params.p << " s_x=" << dent.params.s_x
         << " s_y=" << dent.params.s_y << " c_x=" << dent.pose.c_x << " c_y=" << dent.pose.c_y
         << " theta=" << dent.pose.theta << " noise=" << sc.noise_sigma << " seed=" << sc.seed << "\n";
    write_xyz(text, cloud);
    emit(out, text.str());
    if (!hf.empty()) {
        std::ostringstream grid;
        write_height_field(grid, sample_height_field(dent.params, hf_spacing > 0.0 ? hf_spacing : sc.spacing));
        write_file_atomic(hf, grid.str());
    }
    return kExitOk;
}

int run_fit(PipelineFlags& f) {
    const PipelineConfig config = finalize(f);
    HeatmapSpec spec{f.scale, f.pitch};
    validate(spec);
    const PreparedCloud prepared = load_and_prepare(f, config);
    if (prepared.segments.empty()) return no_dents(f);

    Json reports = Json::array();
    std::vector<std::pair<fs::path, std::string>> images;
    for (std::size_t i = 0; i < prepared.segments.size(); ++i) {
        const auto& seg = prepared.segments[i];
        const FitReport report = fit(seg, config.fit);
        reports.push_back(to_json(report));
        attach_frame(reports.back(), prepared.frame);
        if (!f.heatmap.empty()) {
            const auto stats = residual_stats(seg, report.params, report.pose);
            const auto field = rasterize(seg.points, stats.residuals, spec.pitch);
            images.emplace_back(indexed_path(f.heatmap, i), encode_ppm(render_heatmap(field, spec)));
        }
    }
    emit(f.out, dump(reports));
    for (const auto& [path, bytes] : images) write_file_atomic(path, bytes);
    return kExitOk;
}

int run_compare(PipelineFlags& f) {
    const PipelineConfig config = finalize(f);
    const PreparedCloud prepared = load_and_prepare(f, config);
    if (prepared.segments.empty()) return no_dents(f);
    Json reports = Json::array();
    for (const auto& seg : prepared.segments) {
        reports.push_back(to_json(compare_fits(seg, config.fit)));
        attach_frame(reports.back(), prepared.frame);
    }
    emit(f.out, dump(reports));
    return kExitOk;
}

HeightField load_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    try {
        return read_height_field(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

int run_srm(const std::string& report_path, const std::string& field_path, const std::string& out) {
    Json result = Json::array();
    if (!field_path.empty()) {
        result.push_back(to_json(srm_box_measures(load_field(field_path))));
    } else {
        std::ifstream in(report_path);
        if (!in) throw IoError("cannot open '" + report_path + "'");
        Json doc;
        try {
            doc = Json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(report_path + ": " + e.what());
        }
        if (!doc.is_array()) doc = Json::array({doc});
        for (const auto& entry : doc) {
            // Compare output nests reports per mode; use the full model.
            const Json& report = entry.contains("full7") ? entry.at("full7") : entry;
            result.push_back(to_json(model_srm(params_from_json(report))));
        }
        if (result.empty()) {
            emit(out, dump(result));
            return kExitNoDents;
        }
    }
    emit(out, dump(result));
    return kExitOk;
}

int run_render(const std::string& field_path, const std::string& out, double scale) {
    HeatmapSpec spec;
    spec.scale = scale;
    validate(spec);
    write_file_atomic(out, encode_ppm(render_heatmap(load_field(field_path), spec)));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dentfit: parametric dent model synthesis and fitting for skin point clouds"};
    app.require_subcommand(1);

    ParamFlags synth_params;
    SynthConfig synth_config;
    std::string synth_out, synth_hf;
    double synth_hf_spacing = 0.0;
    auto* synth = app.add_subcommand("synth", "Write a synthetic dent on a flat patch as .xyz");
    add_param_flags(synth, synth_params);
    synth->add_option("--spacing", synth_config.spacing, "Sample spacing (mm)");
    synth->add_option("--noise", synth_config.noise_sigma, "Gaussian height noise sigma (mm)");
    synth->add_option("--margin", synth_config.margin, "Flat border (mm); default half the dent size");
    synth->add_option("--seed", synth_config.seed, "Noise seed");
    synth->add_option("--out,-o", synth_out, "Output .xyz path (stdout when omitted)");
    synth->add_option("--hf", synth_hf, "Also write the dent's height field (HF v1 grid)");
    synth->add_option("--hf-spacing", synth_hf_spacing, "Grid spacing for --hf (mm); default --spacing");

    PipelineFlags fit_flags;
    auto* fit_cmd = app.add_subcommand("fit", "Fit the dent model to every dent in a cloud");
    add_pipeline_flags(fit_cmd, fit_flags);
    fit_cmd->add_option("--heatmap", fit_flags.heatmap, "Residual heatmap (.ppm); extra dents get _N suffixes");
    fit_cmd->add_option("--scale", fit_flags.scale, "Heatmap residual mapped to full red (mm)");
    fit_cmd->add_option("--pitch", fit_flags.pitch, "Heatmap pixel size (mm)");
    fit_cmd->add_option("--segments-out", fit_flags.segments_out, "Write segmented points as .xyz");

    PipelineFlags cmp_flags;
    auto* cmp_cmd = app.add_subcommand("compare", "Fit simplified3 and full7 per dent and compare MAE");
    add_pipeline_flags(cmp_cmd, cmp_flags);
    cmp_cmd->add_option("--segments-out", cmp_flags.segments_out, "Write segmented points as .xyz");

    std::string srm_report, srm_field, srm_out;
    auto* srm = app.add_subcommand("srm", "Box measures (length, width, depth) and their depth discrepancy");
    auto* srm_src = srm->add_option_group("source");
    srm_src->add_option("--report", srm_report, "JSON from fit or compare");
    srm_src->add_option("--field", srm_field, "HF v1 height field");
    srm_src->require_option(1);
    srm->add_option("--out,-o", srm_out, "Output JSON path (stdout when omitted)");

    std::string render_field, render_out;
    double render_scale = 1.0;
    auto* render = app.add_subcommand("render", "Render an HF v1 grid as a blue-to-red PPM heatmap");
    render->add_option("--field", render_field, "HF v1 height field")->required();
    render->add_option("--out,-o", render_out, "Output .ppm path")->required();
    render->add_option("--scale", render_scale, "Value mapped to full red (mm)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (*synth) return run_synth(synth_params, synth_config, synth_out, synth_hf, synth_hf_spacing);
        if (*fit_cmd) return run_fit(fit_flags);
        if (*cmp_cmd) return run_compare(cmp_flags);
        if (*srm) return run_srm(srm_report, srm_field, srm_out);
        if (*render) return run_render(render_field, render_out, render_scale);
    } catch (const std::exception& e) {
        std::cerr << "dentfit: error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
