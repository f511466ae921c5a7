#include "pap/config.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "pap/errors.hpp"

namespace pap {

namespace {

using json = nlohmann::ordered_json;

struct Collector {
    std::vector<std::string> errors;

    void add(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

    void finish() const {
        if (errors.empty()) return;
        std::string all = "config has " + std::to_string(errors.size()) + " problem(s):";
        for (const auto& e : errors) all += "\n  - " + e;
        throw config_error(all);
    }
};

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed,
                Collector& c) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) c.add(path + "." + it.key(), "unknown key");
}

double get_num(const json& obj, const std::string& path, const std::string& key, double fallback,
               Collector& c) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) {
        c.add(path + "." + key, "expected a number");
        return fallback;
    }
    return obj[key].get<double>();
}

int get_int(const json& obj, const std::string& path, const std::string& key, int fallback,
            Collector& c) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer()) {
        c.add(path + "." + key, "expected an integer");
        return fallback;
    }
    return obj[key].get<int>();
}

bool get_bool(const json& obj, const std::string& path, const std::string& key, bool fallback,
              Collector& c) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_boolean()) {
        c.add(path + "." + key, "expected a boolean");
        return fallback;
    }
    return obj[key].get<bool>();
}

std::string get_str(const json& obj, const std::string& path, const std::string& key,
                    const std::string& fallback, Collector& c) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_string()) {
        c.add(path + "." + key, "expected a string");
        return fallback;
    }
    return obj[key].get<std::string>();
}

std::complex<double> get_complex(const json& obj, const std::string& path, const std::string& key,
                                 std::complex<double> fallback, Collector& c) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj[key];
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    c.add(path + "." + key, "expected a number or [re, im]");
    return fallback;
}

std::vector<double> get_num_list(const json& obj, const std::string& path, const std::string& key,
                                 std::vector<double> fallback, Collector& c) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_array()) {
        c.add(path + "." + key, "expected an array of numbers");
        return fallback;
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < obj[key].size(); ++i) {
        if (!obj[key][i].is_number()) {
            c.add(path + "." + key + "[" + std::to_string(i) + "]", "expected a number");
            return fallback;
        }
        out.push_back(obj[key][i].get<double>());
    }
    return out;
}

void parse_atom(const json& j, RunConfig& cfg, Collector& c) {
    check_keys(j, "atom", {"ground_label", "levels", "probe"}, c);
    cfg.atom.ground_label = get_str(j, "atom", "ground_label", cfg.atom.ground_label, c);
    if (j.contains("levels")) {
        if (!j["levels"].is_array()) {
            c.add("atom.levels", "expected an array");
        } else {
            cfg.atom.excited.clear();
            for (std::size_t i = 0; i < j["levels"].size(); ++i) {
                const std::string path = "atom.levels[" + std::to_string(i) + "]";
                const json& lv = j["levels"][i];
                if (!lv.is_object()) {
                    c.add(path, "expected an object");
                    continue;
                }
                check_keys(lv, path, {"label", "wavelength_nm", "dipole_weight"}, c);
                LevelSpec spec;
                spec.label = get_str(lv, path, "label", "level" + std::to_string(i), c);
                spec.transition_wavelength_nm = get_num(lv, path, "wavelength_nm", 0.0, c);
                spec.dipole_weight = get_num(lv, path, "dipole_weight", 1.0, c);
                if (!(spec.transition_wavelength_nm > 0.0))
                    c.add(path + ".wavelength_nm", "must be > 0");
                if (!(spec.dipole_weight > 0.0)) c.add(path + ".dipole_weight", "must be > 0");
                cfg.atom.excited.push_back(spec);
            }
        }
    }
    if (j.contains("probe")) {
        const json& p = j["probe"];
        if (!p.is_object()) {
            c.add("atom.probe", "expected an object");
        } else {
            check_keys(p, "atom.probe", {"amp1", "amp2", "d11", "d22", "d12"}, c);
            cfg.atom.probe.amp1 = get_complex(p, "atom.probe", "amp1", cfg.atom.probe.amp1, c);
            cfg.atom.probe.amp2 = get_complex(p, "atom.probe", "amp2", cfg.atom.probe.amp2, c);
            cfg.atom.probe.d11 = get_num(p, "atom.probe", "d11", cfg.atom.probe.d11, c);
            cfg.atom.probe.d22 = get_num(p, "atom.probe", "d22", cfg.atom.probe.d22, c);
            cfg.atom.probe.d12 = get_complex(p, "atom.probe", "d12", cfg.atom.probe.d12, c);
        }
    }
}

void parse_grid(const json& j, RunConfig& cfg, Collector& c) {
    check_keys(j, "grid",
               {"lambda_min_nm", "lambda_max_nm", "n_points", "source_center_nm", "source_fwhm_nm",
                "carrier_nm"},
               c);
    cfg.grid_lambda_min_nm = get_num(j, "grid", "lambda_min_nm", cfg.grid_lambda_min_nm, c);
    cfg.grid_lambda_max_nm = get_num(j, "grid", "lambda_max_nm", cfg.grid_lambda_max_nm, c);
    cfg.grid_n_points = get_int(j, "grid", "n_points", cfg.grid_n_points, c);
    cfg.source_center_nm = get_num(j, "grid", "source_center_nm", cfg.source_center_nm, c);
    cfg.source_fwhm_nm = get_num(j, "grid", "source_fwhm_nm", cfg.source_fwhm_nm, c);
    cfg.carrier_nm = get_num(j, "grid", "carrier_nm", cfg.carrier_nm, c);
}

void parse_shape(const json& j, RunConfig& cfg, Collector& c) {
    check_keys(j, "shape", {"windows", "pixel_width_nm"}, c);
    if (j.contains("windows")) {
        if (!j["windows"].is_array()) {
            c.add("shape.windows", "expected an array");
        } else {
            cfg.shape.windows.clear();
            for (std::size_t i = 0; i < j["windows"].size(); ++i) {
                const std::string path = "shape.windows[" + std::to_string(i) + "]";
                const json& w = j["windows"][i];
                if (!w.is_object()) {
                    c.add(path, "expected an object");
                    continue;
                }
                check_keys(w, path,
                           {"center_nm", "fwhm_nm", "rel_amplitude", "chirp_fs2", "phase_rad",
                            "delay_fs"},
                           c);
                WindowSpec win;
                win.center_nm = get_num(w, path, "center_nm", 0.0, c);
                win.fwhm_nm = get_num(w, path, "fwhm_nm", 0.0, c);
                win.rel_amplitude = get_num(w, path, "rel_amplitude", 1.0, c);
                win.chirp_fs2 = get_num(w, path, "chirp_fs2", 0.0, c);
                win.phase_rad = get_num(w, path, "phase_rad", 0.0, c);
                win.delay_fs = get_num(w, path, "delay_fs", 0.0, c);
                if (!(win.center_nm > 0.0)) c.add(path + ".center_nm", "must be > 0");
                if (!(win.fwhm_nm > 0.0)) c.add(path + ".fwhm_nm", "must be > 0");
                if (win.rel_amplitude < 0.0) c.add(path + ".rel_amplitude", "must be >= 0");
                cfg.shape.windows.push_back(win);
            }
        }
    }
    if (j.contains("pixel_width_nm") && !j["pixel_width_nm"].is_null()) {
        const double w = get_num(j, "shape", "pixel_width_nm", 0.0, c);
        if (!(w > 0.0))
            c.add("shape.pixel_width_nm", "must be > 0");
        else
            cfg.shape.pixel_width_nm = w;
    }
}

void parse_experiment(const json& j, RunConfig& cfg, Collector& c) {
    std::vector<std::string> names;
    for (auto it = j.begin(); it != j.end(); ++it) names.push_back(it.key());
    for (const auto& name : names) {
        bool known = false;
        for (const auto& k : known_experiments()) known |= (k == name);
        if (!known) c.add("experiment." + name, "unknown experiment name");
    }
    if (names.size() > 1) {
        std::string joined;
        for (const auto& n : names) joined += (joined.empty() ? "" : ", ") + n;
        c.add("experiment", "ambiguous: more than one experiment set (" + joined + ")");
        return;
    }
    if (names.empty()) return;
    const std::string& name = names.front();
    const json& p = j[name];
    if (!p.is_object()) {
        c.add("experiment." + name, "expected an object");
        return;
    }
    const std::string path = "experiment." + name;
    cfg.experiment_name = name;

    if (name == "synthesize") {
        check_keys(p, path, {}, c);
        cfg.params = SynthesizeParams{};
    } else if (name == "simulate") {
        check_keys(p, path, {"amplitude_scale", "target_area_eff_rad"}, c);
        SimulateParams sp;
        if (p.contains("amplitude_scale")) sp.amplitude_scale = get_num(p, path, "amplitude_scale", 1.0, c);
        if (p.contains("target_area_eff_rad"))
            sp.target_area_eff_rad = get_num(p, path, "target_area_eff_rad", constants::pi, c);
        if (sp.amplitude_scale && sp.target_area_eff_rad)
            c.add(path, "amplitude_scale and target_area_eff_rad are mutually exclusive");
        cfg.params = sp;
    } else if (name == "scan-rabi") {
        check_keys(p, path, {"line", "areas_rad", "window_fwhm_nm"}, c);
        RabiScanParams sp;
        sp.line = get_str(p, path, "line", sp.line, c);
        sp.areas_rad = get_num_list(p, path, "areas_rad", sp.areas_rad, c);
        sp.window_fwhm_nm = get_num(p, path, "window_fwhm_nm", sp.window_fwhm_nm, c);
        if (sp.line != "d1" && sp.line != "d2") c.add(path + ".line", "must be 'd1' or 'd2'");
        cfg.params = sp;
    } else if (name == "scan-ap") {
        check_keys(p, path, {"line", "chirp_fs2", "areas_rad", "window_fwhm_nm"}, c);
        ApScanParams sp;
        sp.line = get_str(p, path, "line", sp.line, c);
        sp.chirp_fs2 = get_num(p, path, "chirp_fs2", sp.chirp_fs2, c);
        sp.areas_rad = get_num_list(p, path, "areas_rad", sp.areas_rad, c);
        sp.window_fwhm_nm = get_num(p, path, "window_fwhm_nm", sp.window_fwhm_nm, c);
        if (sp.line != "d1" && sp.line != "d2") c.add(path + ".line", "must be 'd1' or 'd2'");
        if (sp.chirp_fs2 < 0.0) c.add(path + ".chirp_fs2", "must be >= 0");
        cfg.params = sp;
    } else if (name == "scan-2d") {
        check_keys(p, path, {"areas_rad", "delay_start_fs", "delay_end_fs", "delay_step_fs"}, c);
        Scan2DConfig sp;
        sp.areas_rad = get_num_list(p, path, "areas_rad", sp.areas_rad, c);
        if (p.contains("delay_start_fs")) sp.delay_start_fs = get_num(p, path, "delay_start_fs", 0.0, c);
        if (p.contains("delay_end_fs")) sp.delay_end_fs = get_num(p, path, "delay_end_fs", 0.0, c);
        sp.delay_step_fs = get_num(p, path, "delay_step_fs", sp.delay_step_fs, c);
        if (!(sp.delay_step_fs > 0.0)) c.add(path + ".delay_step_fs", "must be > 0");
        cfg.params = sp;
    } else if (name == "completeness") {
        check_keys(p, path,
                   {"delay_fs", "area_d1_rad", "area_d2_rad", "chirp_d1_fs2", "chirp_d2_fs2",
                    "window_fwhm_nm"},
                   c);
        CompletenessConfig sp;
        sp.delay_fs = get_num(p, path, "delay_fs", sp.delay_fs, c);
        sp.area_d1_rad = get_num(p, path, "area_d1_rad", sp.area_d1_rad, c);
        sp.area_d2_rad = get_num(p, path, "area_d2_rad", sp.area_d2_rad, c);
        sp.chirp_d1_fs2 = get_num(p, path, "chirp_d1_fs2", sp.chirp_d1_fs2, c);
        sp.chirp_d2_fs2 = get_num(p, path, "chirp_d2_fs2", sp.chirp_d2_fs2, c);
        sp.window_fwhm_nm = get_num(p, path, "window_fwhm_nm", sp.window_fwhm_nm, c);
        if (!(sp.delay_fs > 0.0)) c.add(path + ".delay_fs", "must be > 0");
        cfg.params = sp;
    } else if (name == "phase-control") {
        check_keys(p, path,
                   {"offsets_rad", "offset_line", "a_eff_rad", "chirp_fs2", "window_fwhm_nm"}, c);
        PhaseControlConfig sp;
        sp.offsets_rad = get_num_list(p, path, "offsets_rad", sp.offsets_rad, c);
        sp.offset_line = get_str(p, path, "offset_line", sp.offset_line, c);
        sp.a_eff_rad = get_num(p, path, "a_eff_rad", sp.a_eff_rad, c);
        sp.chirp_fs2 = get_num(p, path, "chirp_fs2", sp.chirp_fs2, c);
        sp.window_fwhm_nm = get_num(p, path, "window_fwhm_nm", sp.window_fwhm_nm, c);
        if (sp.offset_line != "d1" && sp.offset_line != "d2")
            c.add(path + ".offset_line", "must be 'd1' or 'd2'");
        if (sp.offsets_rad.empty()) c.add(path + ".offsets_rad", "must not be empty");
        cfg.params = sp;
    } else if (name == "amplitude-control") {
        check_keys(p, path,
                   {"targets", "max_iterations", "window_fwhm_nm", "chirp_fs2", "a_eff_rad",
                    "tolerance", "independent_channels", "narrowband_fwhm_nm"},
                   c);
        AmplitudeControlConfig sp;
        sp.targets = get_num_list(p, path, "targets", sp.targets, c);
        sp.max_iterations = get_int(p, path, "max_iterations", sp.max_iterations, c);
        sp.window_fwhm_nm = get_num(p, path, "window_fwhm_nm", sp.window_fwhm_nm, c);
        sp.chirp_fs2 = get_num(p, path, "chirp_fs2", sp.chirp_fs2, c);
        sp.a_eff_rad = get_num(p, path, "a_eff_rad", sp.a_eff_rad, c);
        sp.tolerance = get_num(p, path, "tolerance", sp.tolerance, c);
        sp.independent_channels = get_bool(p, path, "independent_channels", false, c);
        if (p.contains("narrowband_fwhm_nm"))
            sp.narrowband_fwhm_nm = get_num(p, path, "narrowband_fwhm_nm", 0.18, c);
        for (std::size_t i = 0; i < sp.targets.size(); ++i)
            if (!(sp.targets[i] > 0.0))
                c.add(path + ".targets[" + std::to_string(i) + "]", "must be > 0");
        if (sp.max_iterations < 0) c.add(path + ".max_iterations", "must be >= 0");
        cfg.params = sp;
    }
}

json complex_json(const std::complex<double>& z) { return json::array({z.real(), z.imag()}); }

}  // namespace

SpectralGrid RunConfig::grid() const {
    return make_grid_nm(grid_lambda_min_nm, grid_lambda_max_nm, grid_n_points);
}

Setup RunConfig::setup() const {
    Setup s;
    s.atom = atom;
    s.grid = grid();
    s.source_center_nm = source_center_nm;
    s.source_fwhm_nm = source_fwhm_nm;
    s.carrier = angular_frequency(carrier_nm);
    s.integrator = integrator;
    return s;
}

const std::vector<std::string>& known_experiments() {
    static const std::vector<std::string> names = {
        "synthesize", "simulate",     "scan-rabi",     "scan-ap",
        "scan-2d",    "completeness", "phase-control", "amplitude-control"};
    return names;
}

RunConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config syntax error: ") + e.what());
    }
    if (!root.is_object()) throw config_error("config: top level must be an object");

    Collector c;
    RunConfig cfg = default_config();
    cfg.experiment_name.clear();
    cfg.params = std::monostate{};

    check_keys(root, "config",
               {"atom", "grid", "shape", "integrator", "experiment", "output_dir"}, c);

    if (root.contains("atom")) {
        if (root["atom"].is_object())
            parse_atom(root["atom"], cfg, c);
        else
            c.add("atom", "expected an object");
    }
    if (root.contains("grid")) {
        if (root["grid"].is_object())
            parse_grid(root["grid"], cfg, c);
        else
            c.add("grid", "expected an object");
    }
    if (root.contains("shape")) {
        if (root["shape"].is_object())
            parse_shape(root["shape"], cfg, c);
        else
            c.add("shape", "expected an object");
    }
    if (root.contains("integrator")) {
        const json& ig = root["integrator"];
        if (!ig.is_object()) {
            c.add("integrator", "expected an object");
        } else {
            check_keys(ig, "integrator", {"dt_max_fs", "method", "convergence_check"}, c);
            cfg.integrator.dt_max_fs = get_num(ig, "integrator", "dt_max_fs", 0.25, c);
            cfg.integrator.method = get_str(ig, "integrator", "method", "rk4", c);
            cfg.integrator.convergence_check = get_bool(ig, "integrator", "convergence_check", false, c);
        }
    }
    if (root.contains("experiment")) {
        if (root["experiment"].is_object())
            parse_experiment(root["experiment"], cfg, c);
        else
            c.add("experiment", "expected an object");
    }
    cfg.output_dir = get_str(root, "config", "output_dir", cfg.output_dir, c);

    // semantic checks that do not need a run
    try {
        cfg.atom.validate();
    } catch (const error& e) {
        c.add("atom", e.what());
    }
    try {
        cfg.grid();
    } catch (const error& e) {
        c.add("grid", e.what());
    }
    try {
        cfg.integrator.validate();
    } catch (const error& e) {
        c.add("integrator", e.what());
    }
    c.finish();
    return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
    json root;
    json atom;
    atom["ground_label"] = cfg.atom.ground_label;
    atom["levels"] = json::array();
    for (const auto& lv : cfg.atom.excited)
        atom["levels"].push_back({{"label", lv.label},
                                  {"wavelength_nm", lv.transition_wavelength_nm},
                                  {"dipole_weight", lv.dipole_weight}});
    atom["probe"] = {{"amp1", complex_json(cfg.atom.probe.amp1)},
                     {"amp2", complex_json(cfg.atom.probe.amp2)},
                     {"d11", cfg.atom.probe.d11},
                     {"d22", cfg.atom.probe.d22},
                     {"d12", complex_json(cfg.atom.probe.d12)}};
    root["atom"] = atom;

    root["grid"] = {{"lambda_min_nm", cfg.grid_lambda_min_nm},
                    {"lambda_max_nm", cfg.grid_lambda_max_nm},
                    {"n_points", cfg.grid_n_points},
                    {"source_center_nm", cfg.source_center_nm},
                    {"source_fwhm_nm", cfg.source_fwhm_nm},
                    {"carrier_nm", cfg.carrier_nm}};

    json windows = json::array();
    for (const auto& w : cfg.shape.windows)
        windows.push_back({{"center_nm", w.center_nm},
                           {"fwhm_nm", w.fwhm_nm},
                           {"rel_amplitude", w.rel_amplitude},
                           {"chirp_fs2", w.chirp_fs2},
                           {"phase_rad", w.phase_rad},
                           {"delay_fs", w.delay_fs}});
    root["shape"] = {{"windows", windows}};
    if (cfg.shape.pixel_width_nm)
        root["shape"]["pixel_width_nm"] = *cfg.shape.pixel_width_nm;
    else
        root["shape"]["pixel_width_nm"] = nullptr;

    root["integrator"] = {{"dt_max_fs", cfg.integrator.dt_max_fs},
                          {"method", cfg.integrator.method},
                          {"convergence_check", cfg.integrator.convergence_check}};

    if (!cfg.experiment_name.empty()) {
        json p = json::object();
        if (const auto* sp = std::get_if<SimulateParams>(&cfg.params)) {
            if (sp->amplitude_scale) p["amplitude_scale"] = *sp->amplitude_scale;
            if (sp->target_area_eff_rad) p["target_area_eff_rad"] = *sp->target_area_eff_rad;
        } else if (const auto* sp = std::get_if<RabiScanParams>(&cfg.params)) {
            p["line"] = sp->line;
            p["areas_rad"] = sp->areas_rad;
            p["window_fwhm_nm"] = sp->window_fwhm_nm;
        } else if (const auto* sp = std::get_if<ApScanParams>(&cfg.params)) {
            p["line"] = sp->line;
            p["chirp_fs2"] = sp->chirp_fs2;
            p["areas_rad"] = sp->areas_rad;
            p["window_fwhm_nm"] = sp->window_fwhm_nm;
        } else if (const auto* sp = std::get_if<Scan2DConfig>(&cfg.params)) {
            p["areas_rad"] = sp->areas_rad;
            if (sp->delay_start_fs) p["delay_start_fs"] = *sp->delay_start_fs;
            if (sp->delay_end_fs) p["delay_end_fs"] = *sp->delay_end_fs;
            p["delay_step_fs"] = sp->delay_step_fs;
        } else if (const auto* sp = std::get_if<CompletenessConfig>(&cfg.params)) {
            p["delay_fs"] = sp->delay_fs;
            p["area_d1_rad"] = sp->area_d1_rad;
            p["area_d2_rad"] = sp->area_d2_rad;
            p["chirp_d1_fs2"] = sp->chirp_d1_fs2;
            p["chirp_d2_fs2"] = sp->chirp_d2_fs2;
            p["window_fwhm_nm"] = sp->window_fwhm_nm;
        } else if (const auto* sp = std::get_if<PhaseControlConfig>(&cfg.params)) {
            p["offsets_rad"] = sp->offsets_rad;
            p["offset_line"] = sp->offset_line;
            p["a_eff_rad"] = sp->a_eff_rad;
            p["chirp_fs2"] = sp->chirp_fs2;
            p["window_fwhm_nm"] = sp->window_fwhm_nm;
        } else if (const auto* sp = std::get_if<AmplitudeControlConfig>(&cfg.params)) {
            p["targets"] = sp->targets;
            p["max_iterations"] = sp->max_iterations;
            p["window_fwhm_nm"] = sp->window_fwhm_nm;
            p["chirp_fs2"] = sp->chirp_fs2;
            p["a_eff_rad"] = sp->a_eff_rad;
            p["tolerance"] = sp->tolerance;
            p["independent_channels"] = sp->independent_channels;
            if (sp->narrowband_fwhm_nm) p["narrowband_fwhm_nm"] = *sp->narrowband_fwhm_nm;
        }
        root["experiment"] = {{cfg.experiment_name, p}};
    }
    root["output_dir"] = cfg.output_dir;
    return root.dump(2) + "\n";
}

RunConfig default_config() {
    RunConfig cfg;
    cfg.atom = default_potassium();
    // flat narrow double window: a long clean pulse train for the synthesize demo
    cfg.shape.windows = {
        WindowSpec{769.9, 0.1, 1.0, 0.0, 0.0, 0.0},
        WindowSpec{766.5, 0.1, 1.0, 0.0, 0.0, 0.0},
    };
    return cfg;
}

}  // namespace pap
