// dogfit command line: synth | fit | eval | export

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dogfit/log.hpp"
#include "dogfit/metrics.hpp"
#include "dogfit/observation.hpp"
#include "dogfit/pipeline.hpp"
#include "dogfit/synth.hpp"

namespace fs = std::filesystem;

namespace {

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void write_obj(const dogfit::PosedMesh<double>& mesh, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const auto& v : mesh.vertices) out << "v " << v.x << " " << v.y << " " << v.z << "\n";
    for (const auto& f : *mesh.faces)
        out << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
}

nlohmann::json body_state_json(const dogfit::BodyState& st,
                               const std::vector<std::vector<dogfit::Vec3<double>>>& joints) {
    nlohmann::json j;
    j["beta"] = st.beta;
    j["scale"] = st.scale;
    nlohmann::json frames = nlohmann::json::array();
    for (const auto& f : st.frames) {
        nlohmann::json fr;
        fr["theta"] = f.theta;
        fr["gamma"] = {f.gamma.x, f.gamma.y, f.gamma.z};
        fr["phi"] = f.phi;
        frames.push_back(std::move(fr));
    }
    j["frames"] = std::move(frames);
    nlohmann::json jt = nlohmann::json::array();
    for (const auto& frame : joints) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& p : frame) arr.push_back({p.x, p.y, p.z});
        jt.push_back(std::move(arr));
    }
    j["joints"] = std::move(jt);
    return j;
}

int run_synth(const std::string& spec_path, const std::string& out_dir) {
    dogfit::SynthSpec spec;
    if (!spec_path.empty()) spec = read_json_file(spec_path).get<dogfit::SynthSpec>();
    spec.validate();

    const dogfit::TemplateAssets assets = dogfit::make_template(spec.seed, spec.size_class);
    const dogfit::CameraRig rig = dogfit::make_ring_rig(spec);
    const dogfit::BodyState gt = dogfit::synth_motion(assets, spec);
    const dogfit::SynthSequence synth = dogfit::render_observations(rig, assets, gt, spec);

    dogfit::SequenceData seq;
    seq.rig = synth.rig;
    seq.meta.frame_count = spec.frame_count;
    seq.meta.fps = spec.fps;
    seq.meta.setting = "mv-rgbd";
    seq.observations = synth.observations;
    dogfit::save_sequence(seq, out_dir);
    dogfit::save_assets(assets, (fs::path(out_dir) / "assets.json").string());
    write_text(fs::path(out_dir) / "ground_truth.json",
               body_state_json(gt, synth.joint_trajectories).dump());
    write_text(fs::path(out_dir) / "synth_spec.json", nlohmann::json(spec).dump(2));
    std::cout << "wrote sequence (" << rig.cameras.size() << " views, " << spec.frame_count
              << " frames) to " << out_dir << "\n";
    return 0;
}

int run_fit(const std::string& seq_dir, const std::string& assets_path,
            const std::string& setting, const std::string& config_path,
            const std::string& out_dir, bool export_mesh) {
    dogfit::FitSettings settings;
    if (!config_path.empty()) settings = read_json_file(config_path).get<dogfit::FitSettings>();
    settings.setting = dogfit::setting_from_string(setting);

    const dogfit::TemplateAssets assets = dogfit::load_assets(assets_path);
    const dogfit::SequenceData seq =
        dogfit::load_sequence(seq_dir, dogfit::setting_uses_depth(settings.setting));

    const dogfit::MotionSolution sol = dogfit::fit_sequence(seq, assets, settings);
    fs::create_directories(out_dir);
    dogfit::save_solution(sol, (fs::path(out_dir) / "solution.json").string());
    if (export_mesh) {
        fs::create_directories(fs::path(out_dir) / "mesh");
        for (int t = 0; t < sol.state.frame_count(); ++t) {
            char name[32];
            std::snprintf(name, sizeof(name), "%06d.obj", t);
            write_obj(dogfit::pose_mesh(assets, sol.state, t), fs::path(out_dir) / "mesh" / name);
        }
    }
    std::cout << "solution written to " << (fs::path(out_dir) / "solution.json").string() << "\n";
    return 0;
}

int run_eval(const std::string& seq_dir, const std::string& assets_path,
             const std::string& solution_path, const std::string& out_dir) {
    const dogfit::TemplateAssets assets = dogfit::load_assets(assets_path);
    const dogfit::SequenceData seq = dogfit::load_sequence(seq_dir, false);
    const dogfit::MotionSolution sol = dogfit::load_solution(solution_path);

    const dogfit::MetricsReport rep = dogfit::evaluate_sequence(assets, sol.state, seq);
    fs::create_directories(out_dir);
    write_text(fs::path(out_dir) / "metrics.json", nlohmann::json(rep).dump(2));

    std::printf("%-8s %-8s %-8s %-8s %-10s %-8s\n", "IoU", "IoU_w5", "F-score", "Pene%", "Jitter",
                "FS");
    std::printf("%-8.4f %-8.4f %-8.4f %-8.4f %-10.6f %-8.6f\n", rep.iou, rep.iou_w5, rep.fscore,
                rep.pene_pct, rep.jitter, rep.foot_skating);
    return 0;
}

int run_export(const std::string& solution_path, const std::string& assets_path,
               const std::string& out_dir) {
    const dogfit::TemplateAssets assets = dogfit::load_assets(assets_path);
    const dogfit::MotionSolution sol = dogfit::load_solution(solution_path);
    fs::create_directories(fs::path(out_dir) / "mesh");

    std::ofstream csv(fs::path(out_dir) / "joints.csv");
    if (!csv) throw std::runtime_error("cannot write joints.csv");
    csv << "frame,joint,x,y,z\n";
    for (int t = 0; t < sol.state.frame_count(); ++t) {
        const dogfit::PosedMesh<double> mesh = dogfit::pose_mesh(assets, sol.state, t);
        char name[32];
        std::snprintf(name, sizeof(name), "%06d.obj", t);
        write_obj(mesh, fs::path(out_dir) / "mesh" / name);
        for (std::size_t k = 0; k < mesh.joints.size(); ++k)
            csv << t << "," << k << "," << mesh.joints[k].x << "," << mesh.joints[k].y << ","
                << mesh.joints[k].z << "\n";
    }
    std::cout << "exported " << sol.state.frame_count() << " frames to " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dogfit: quadruped motion recovery from multi-view RGB(-D) sequences"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "parallelism cap (0 = auto)");

    auto* synth = app.add_subcommand("synth", "generate a synthetic sequence");
    std::string spec_path, out_dir;
    synth->add_option("--spec", spec_path, "SynthSpec JSON file (defaults when omitted)");
    synth->add_option("--out", out_dir, "output sequence directory")->required();

    auto* fit = app.add_subcommand("fit", "fit the body model to a sequence");
    std::string seq_dir, assets_path, setting = "mv-rgbd", config_path;
    bool export_mesh = false;
    fit->add_option("--seq", seq_dir, "sequence directory")->required();
    fit->add_option("--assets", assets_path, "template assets JSON")->required();
    fit->add_option("--setting", setting, "sv-rgb|sv-rgbd|mv-rgb|mv-rgbd");
    fit->add_option("--config", config_path, "FitSettings JSON overrides");
    fit->add_option("--out", out_dir, "output directory")->required();
    fit->add_flag("--export-mesh", export_mesh, "also write per-frame OBJ meshes");

    auto* eval = app.add_subcommand("eval", "evaluate a solution against a sequence");
    std::string solution_path;
    eval->add_option("--seq", seq_dir, "sequence directory")->required();
    eval->add_option("--assets", assets_path, "template assets JSON")->required();
    eval->add_option("--solution", solution_path, "solution.json")->required();
    eval->add_option("--out", out_dir, "output directory")->required();

    auto* exp = app.add_subcommand("export", "export a solution to OBJ + joint CSV");
    exp->add_option("--solution", solution_path, "solution.json")->required();
    exp->add_option("--assets", assets_path, "template assets JSON")->required();
    exp->add_option("--out", out_dir, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) return run_synth(spec_path, out_dir);
        if (*fit) return run_fit(seq_dir, assets_path, setting, config_path, out_dir, export_mesh);
        if (*eval) return run_eval(seq_dir, assets_path, solution_path, out_dir);
        if (*exp) return run_export(solution_path, assets_path, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
