#include "dentfit/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <system_error>

#include "dentfit/errors.hpp"

namespace dentfit {

namespace {

Json number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return round9(v);
}

double get_number(const Json& obj, const char* key) {
    if (!obj.contains(key) || !obj.at(key).is_number()) {
        throw ParseError(std::string("report field '") + key + "' missing or not a number");
    }
    return obj.at(key).get<double>();
}

}  // namespace

double round9(double value) {
    if (!std::isfinite(value)) return value;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return std::strtod(buf, nullptr);
}

Json to_json(const DentParams& p) {
    Json j;
    j["l"] = number(p.l);
    j["w"] = number(p.w);
    j["d"] = number(p.d);
    j["b"] = number(p.b);
    j["p"] = number(p.p);
    j["s_x"] = number(p.s_x);
    j["s_y"] = number(p.s_y);
    return j;
}

Json to_json(const Pose& pose) {
    Json j;
    j["c_x"] = number(pose.c_x);
    j["c_y"] = number(pose.c_y);
    j["theta"] = number(pose.theta);
    return j;
}

Json to_json(const SrmMeasures& srm) {
    Json j;
    j["length"] = number(srm.length);
    j["width"] = number(srm.width);
    j["depth_at_width_section"] = number(srm.depth_at_width_section);
    j["max_depth"] = number(srm.max_depth);
    j["discrepancy"] = number(srm.depth_discrepancy());
    return j;
}

Json to_json(const FitReport& r) {
    Json j;
    j["params"] = to_json(r.params);
    j["pose"] = to_json(r.pose);
    Json metrics;
    metrics["mae"] = number(r.mae);
    metrics["rmse"] = number(r.rmse);
    metrics["max_residual"] = number(r.max_residual);
    metrics["objective"] = number(r.objective);
    metrics["n_points"] = r.n_points;
    j["metrics"] = metrics;
    j["srm"] = to_json(r.srm);
    Json conv;
    conv["mode"] = to_string(r.mode);
    conv["converged"] = r.converged;
    conv["evaluations"] = r.evaluations;
    conv["total_evaluations"] = r.total_evaluations;
    conv["best_start"] = r.best_start;
    conv["weakly_identified_b"] = r.weakly_identified_b;
    conv["multimodal"] = r.multimodal;
    j["convergence"] = conv;
    return j;
}

Json to_json(const CompareReport& r) {
    Json j;
    j["simplified3"] = to_json(r.simplified);
    j["full7"] = to_json(r.full);
    j["mae_ratio"] = number(r.mae_ratio);
    return j;
}

namespace {

Json vec3(const Eigen::Vector3d& v) { return Json::array({number(v.x()), number(v.y()), number(v.z())}); }

void attach_pose_frame(Json& pose, const PlaneFrame& frame) {
    const double cx = pose.at("c_x").get<double>(), cy = pose.at("c_y").get<double>();
    pose["center_world"] = vec3(frame.origin + cx * frame.u + cy * frame.v);
    pose["plane"] = to_json(frame);
}

}  // namespace

Json to_json(const PlaneFrame& frame) {
    Json j;
    j["origin"] = vec3(frame.origin);
    j["normal"] = vec3(frame.normal);
    j["u"] = vec3(frame.u);
    j["v"] = vec3(frame.v);
    return j;
}

void attach_frame(Json& report, const PlaneFrame& frame) {
    if (report.contains("pose")) attach_pose_frame(report["pose"], frame);
    for (const char* key : {"simplified3", "full7"}) {
        if (report.contains(key)) attach_pose_frame(report[key]["pose"], frame);
    }
}

DentParams params_from_json(const Json& json) {
    const Json& p = json.contains("params") ? json.at("params") : json;
    DentParams out;
    out.l = get_number(p, "l");
    out.w = get_number(p, "w");
    out.d = get_number(p, "d");
    out.b = get_number(p, "b");
    out.p = get_number(p, "p");
    out.s_x = get_number(p, "s_x");
    out.s_y = get_number(p, "s_y");
    validate(out);
    return out;
}

Pose pose_from_json(const Json& json) {
    const Json& p = json.contains("pose") ? json.at("pose") : json;
    return {get_number(p, "c_x"), get_number(p, "c_y"), get_number(p, "theta")};
}

std::string dump(const Json& json) { return json.dump(2) + "\n"; }

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw IoError("failed writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignored;
        std::filesystem::remove(tmp, ignored);
        throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
    }
}

}  // namespace dentfit
