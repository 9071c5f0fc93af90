#include "perilod/json_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace perilod::json_io {

namespace {

using nlohmann::json;

/// Field-by-field reader that rejects unknown keys when done.
class StrictObject {
  public:
    StrictObject(const json& j, std::string context) : j_(j), context_(std::move(context)) {
        if (!j.is_object()) throw ConfigError(context_ + " must be a JSON object");
    }

    double number(const std::string& key) {
        const json& v = get(key);
        if (!v.is_number()) throw ConfigError(context_ + "." + key + " must be a number");
        return v.get<double>();
    }

    double number_or(const std::string& key, double fallback) {
        return has(key) ? number(key) : fallback;
    }

    int integer(const std::string& key) {
        const json& v = get(key);
        if (!v.is_number_integer())
            throw ConfigError(context_ + "." + key + " must be an integer");
        return v.get<int>();
    }

    int integer_or(const std::string& key, int fallback) {
        return has(key) ? integer(key) : fallback;
    }

    std::uint64_t uint64_or(const std::string& key, std::uint64_t fallback) {
        if (!has(key)) return fallback;
        const json& v = get(key);
        if (!v.is_number_integer())
            throw ConfigError(context_ + "." + key + " must be an integer");
        return v.get<std::uint64_t>();
    }

    bool boolean_or(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = get(key);
        if (!v.is_boolean()) throw ConfigError(context_ + "." + key + " must be a boolean");
        return v.get<bool>();
    }

    std::string text(const std::string& key) {
        const json& v = get(key);
        if (!v.is_string()) throw ConfigError(context_ + "." + key + " must be a string");
        return v.get<std::string>();
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& get(const std::string& key) {
        consumed_.insert(key);
        const auto it = j_.find(key);
        if (it == j_.end()) throw ConfigError(context_ + " is missing required field '" + key + "'");
        return *it;
    }

    void ignore(const std::string& key) { consumed_.insert(key); }

    /// Call last: any field not consumed is unknown.
    void reject_unknown() const {
        for (const auto& [key, value] : j_.items()) {
            if (!consumed_.count(key))
                throw ConfigError(context_ + " has unknown field '" + key + "'");
        }
    }

  private:
    const json& j_;
    std::string context_;
    std::set<std::string> consumed_;
};

int line_of_byte(const std::string& text, std::size_t byte) {
    int line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read file: " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

} // namespace

nlohmann::json parse_document(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": JSON syntax error at line " +
                          std::to_string(line_of_byte(text, e.byte)) + ": " + e.what());
    }
}

geometry::DisplaySpec display_from_json(const json& j) {
    StrictObject obj(j, "display");
    geometry::DisplaySpec d;
    d.hfov_deg = obj.number("hfov_deg");
    d.vfov_deg = obj.number("vfov_deg");
    d.h_px = obj.integer("h_px");
    d.v_px = obj.integer("v_px");
    obj.reject_unknown();
    d.validate();
    return d;
}

nlohmann::json to_json(const geometry::DisplaySpec& d) {
    return {{"hfov_deg", d.hfov_deg}, {"vfov_deg", d.vfov_deg}, {"h_px", d.h_px}, {"v_px", d.v_px}};
}

geometry::InsetSpec inset_from_json(const json& j) {
    StrictObject obj(j, "inset");
    geometry::InsetSpec inset;
    inset.h_extent_deg = obj.number("h_extent_deg");
    inset.v_extent_deg = obj.number("v_extent_deg");
    inset.periphery_h_px = obj.integer("periphery_h_px");
    inset.periphery_v_px = obj.integer("periphery_v_px");
    inset.blend_band_deg = obj.number_or("blend_band_deg", 2.0);
    obj.reject_unknown();
    inset.validate();
    return inset;
}

nlohmann::json to_json(const geometry::InsetSpec& inset) {
    return {{"h_extent_deg", inset.h_extent_deg},
            {"v_extent_deg", inset.v_extent_deg},
            {"periphery_h_px", inset.periphery_h_px},
            {"periphery_v_px", inset.periphery_v_px},
            {"blend_band_deg", inset.blend_band_deg}};
}

gaze::GazeParams params_from_json(const json& j) {
    StrictObject obj(j, "params");
    gaze::GazeParams p;
    p.eye_only_threshold_deg = obj.number_or("eye_only_threshold_deg", p.eye_only_threshold_deg);
    p.simultaneous_onset_deg = obj.number_or("simultaneous_onset_deg", p.simultaneous_onset_deg);
    p.eye_range_deg = obj.number_or("eye_range_deg", p.eye_range_deg);
    p.residual_eye_offset_deg =
        obj.number_or("residual_eye_offset_deg", p.residual_eye_offset_deg);
    p.eye_latency_s = obj.number("eye_latency_s");
    p.eye_velocity_dps = obj.number("eye_velocity_dps");
    p.head_velocity_dps = obj.number("head_velocity_dps");
    p.dwell_s = obj.number("dwell_s");
    obj.ignore("provenance");
    obj.ignore("calibration_rmse_s");
    obj.reject_unknown();
    p.validate();
    return p;
}

nlohmann::json to_json(const gaze::GazeParams& p) {
    return {{"eye_only_threshold_deg", p.eye_only_threshold_deg},
            {"simultaneous_onset_deg", p.simultaneous_onset_deg},
            {"eye_range_deg", p.eye_range_deg},
            {"residual_eye_offset_deg", p.residual_eye_offset_deg},
            {"eye_latency_s", p.eye_latency_s},
            {"eye_velocity_dps", p.eye_velocity_dps},
            {"head_velocity_dps", p.head_velocity_dps},
            {"dwell_s", p.dwell_s}};
}

simulator::ProtocolSpec protocol_from_json(const json& j) {
    StrictObject obj(j, "protocol");
    simulator::ProtocolSpec p;
    p.n_objects = obj.integer_or("n_objects", p.n_objects);
    p.object_size_deg = obj.number_or("object_size_deg", p.object_size_deg);
    p.feature_size_deg = obj.number_or("feature_size_deg", p.feature_size_deg);
    p.search_space_deg.x = obj.number_or("search_space_h_deg", p.search_space_deg.x);
    p.search_space_deg.y = obj.number_or("search_space_v_deg", p.search_space_deg.y);
    p.cluster_extent_deg.x = obj.number_or("cluster_h_deg", p.cluster_extent_deg.x);
    p.cluster_extent_deg.y = obj.number_or("cluster_v_deg", p.cluster_extent_deg.y);
    p.onset_delay_min_s = obj.number_or("onset_delay_min_s", p.onset_delay_min_s);
    p.onset_delay_max_s = obj.number_or("onset_delay_max_s", p.onset_delay_max_s);
    p.slip_probability = obj.number_or("slip_probability", p.slip_probability);
    obj.reject_unknown();
    p.validate();
    return p;
}

nlohmann::json to_json(const simulator::ProtocolSpec& p) {
    return {{"n_objects", p.n_objects},
            {"object_size_deg", p.object_size_deg},
            {"feature_size_deg", p.feature_size_deg},
            {"search_space_h_deg", p.search_space_deg.x},
            {"search_space_v_deg", p.search_space_deg.y},
            {"cluster_h_deg", p.cluster_extent_deg.x},
            {"cluster_v_deg", p.cluster_extent_deg.y},
            {"onset_delay_min_s", p.onset_delay_min_s},
            {"onset_delay_max_s", p.onset_delay_max_s},
            {"slip_probability", p.slip_probability}};
}

nlohmann::json to_json(const simulator::Trial& trial) {
    json objects = json::array();
    for (const auto& o : trial.objects)
        objects.push_back({{"dir", {o.dir.x, o.dir.y}}, {"is_target", o.is_target}});
    return {{"objects", std::move(objects)},
            {"target_present", trial.target_present},
            {"onset_delay_s", trial.onset_delay_s},
            {"seed", trial.seed}};
}

simulator::Trial trial_from_json(const json& j) {
    StrictObject obj(j, "trial");
    simulator::Trial trial;
    const json& objects = obj.get("objects");
    if (!objects.is_array()) throw ConfigError("trial.objects must be an array");
    for (const auto& o : objects) {
        StrictObject so(o, "trial.objects[]");
        const json& dir = so.get("dir");
        if (!dir.is_array() || dir.size() != 2 || !dir[0].is_number() || !dir[1].is_number())
            throw ConfigError("trial.objects[].dir must be [azimuth, elevation]");
        simulator::SceneObject scene{{dir[0].get<double>(), dir[1].get<double>()},
                                     so.boolean_or("is_target", false)};
        so.reject_unknown();
        trial.objects.push_back(scene);
    }
    trial.target_present = obj.boolean_or("target_present", false);
    trial.onset_delay_s = obj.number("onset_delay_s");
    trial.seed = obj.uint64_or("seed", 0);
    obj.reject_unknown();
    return trial;
}

nlohmann::json to_json(const simulator::TrialResult& result) {
    json fixations = json::array();
    for (const auto& fx : result.fixations) {
        fixations.push_back(
            {{"object_index", fx.object_index},
             {"kind", fx.shift.kind == gaze::ShiftKind::EyeOnly ? "eye_only" : "combined"},
             {"duration_s", fx.shift.duration_s},
             {"head_dir", {fx.shift.new_state.head_dir.x, fx.shift.new_state.head_dir.y}},
             {"eye_offset", {fx.shift.new_state.eye_offset.x, fx.shift.new_state.eye_offset.y}}});
    }
    return {{"search_time_s", result.search_time_s},
            {"correct", result.correct},
            {"fixations", std::move(fixations)}};
}

harness::ExperimentConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
    StrictObject obj(j, "config");
    harness::ExperimentConfig config;
    if (obj.has("display")) config.display = display_from_json(obj.get("display"));
    if (obj.has("inset_grid")) {
        const json& grid = obj.get("inset_grid");
        if (!grid.is_array() || grid.empty())
            throw ConfigError("config.inset_grid must be a non-empty array of [h, v] pairs");
        config.inset_grid.clear();
        for (const auto& cell : grid) {
            if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number() ||
                !cell[1].is_number())
                throw ConfigError("config.inset_grid entries must be [h_deg, v_deg] pairs");
            config.inset_grid.emplace_back(cell[0].get<double>(), cell[1].get<double>());
        }
    }
    config.include_undegraded = obj.boolean_or("include_undegraded", config.include_undegraded);
    config.trials_per_condition =
        obj.integer_or("trials_per_condition", config.trials_per_condition);
    if (obj.has("present_absent_ratio")) {
        const json& ratio = obj.get("present_absent_ratio");
        if (!ratio.is_array() || ratio.size() != 2 || !ratio[0].is_number_integer() ||
            !ratio[1].is_number_integer())
            throw ConfigError("config.present_absent_ratio must be [present, absent] integers");
        config.present_ratio = ratio[0].get<int>();
        config.absent_ratio = ratio[1].get<int>();
    }
    config.master_seed = obj.uint64_or("master_seed", config.master_seed);
    if (obj.has("params") && obj.has("params_file"))
        throw ConfigError("config: give either 'params' or 'params_file', not both");
    if (obj.has("params")) {
        config.params = params_from_json(obj.get("params"));
    } else if (obj.has("params_file")) {
        std::filesystem::path p = obj.text("params_file");
        if (p.is_relative()) p = base_dir / p;
        config.params = load_params(p);
    }
    if (obj.has("protocol")) config.protocol = protocol_from_json(obj.get("protocol"));
    config.periphery_h_px = obj.integer_or("periphery_h_px", config.periphery_h_px);
    config.periphery_v_px = obj.integer_or("periphery_v_px", config.periphery_v_px);
    config.blend_band_deg = obj.number_or("blend_band_deg", config.blend_band_deg);
    obj.reject_unknown();
    config.validate();
    return config;
}

harness::ExperimentConfig load_config(const std::filesystem::path& path) {
    const auto doc = parse_document(read_file(path), path.string());
    return config_from_json(doc, path.parent_path());
}

gaze::GazeParams load_params(const std::filesystem::path& path) {
    const auto doc = parse_document(read_file(path), path.string());
    return params_from_json(doc);
}

nlohmann::json params_document(const gaze::GazeParams& params,
                               const std::vector<std::string>& provenance,
                               double calibration_rmse_s) {
    json doc = to_json(params);
    doc["provenance"] = provenance;
    doc["calibration_rmse_s"] = calibration_rmse_s;
    return doc;
}

void save_params(const std::filesystem::path& path, const gaze::GazeParams& params,
                 const std::vector<std::string>& provenance, double calibration_rmse_s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + path.string());
    out << params_document(params, provenance, calibration_rmse_s).dump(2) << "\n";
}

} // namespace perilod::json_io
