#include "skinsim/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace skinsim {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError("config: " + where + ": " + what);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) {
        fail(where, "expected an object");
    }
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : obj.items()) {
        if (!ok.count(item.key())) {
            fail(where, "unknown key '" + item.key() + "'");
        }
    }
}

double get_number(const json& obj, const std::string& where, const char* key,
                  double fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj[key].is_number()) {
        fail(where + "." + key, "expected a number");
    }
    return obj[key].get<double>();
}

long get_integer(const json& obj, const std::string& where, const char* key,
                 long fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj[key].is_number_integer()) {
        fail(where + "." + key, "expected an integer");
    }
    return obj[key].get<long>();
}

bool get_bool(const json& obj, const std::string& where, const char* key,
              bool fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj[key].is_boolean()) {
        fail(where + "." + key, "expected a boolean");
    }
    return obj[key].get<bool>();
}

std::string get_string(const json& obj, const std::string& where, const char* key,
                       const std::string& fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj[key].is_string()) {
        fail(where + "." + key, "expected a string");
    }
    return obj[key].get<std::string>();
}

const char* shielding_name(ShieldingMode mode) {
    switch (mode) {
        case ShieldingMode::Unshielded: return "unshielded";
        case ShieldingMode::ActiveOnly: return "active_only";
        case ShieldingMode::ActivePassive: return "active_passive";
    }
    return "unshielded";
}

ShieldingMode parse_shielding(const std::string& name, const std::string& where) {
    if (name == "unshielded") return ShieldingMode::Unshielded;
    if (name == "active_only") return ShieldingMode::ActiveOnly;
    if (name == "active_passive") return ShieldingMode::ActivePassive;
    fail(where, "unknown shielding mode '" + name + "'");
}

void parse_units(const json& doc) {
    if (!doc.contains("units")) {
        return;
    }
    const json& units = doc["units"];
    check_keys(units, "units", {"length", "capacitance", "force", "angle"});
    const struct {
        const char* key;
        const char* expected;
    } tags[] = {{"length", "mm"},
                {"capacitance", "pF"},
                {"force", "N"},
                {"angle", "rad"}};
    for (const auto& tag : tags) {
        const std::string v =
            get_string(units, "units", tag.key, tag.expected);
        if (v != tag.expected) {
            fail(std::string("units.") + tag.key,
                 "this build computes in '" + std::string(tag.expected) + "'");
        }
    }
}

SensorModel parse_model(const json& doc) {
    const SensorModel fallback = SensorModel::reference();

    FittedCoefficients coeffs = fallback.coeffs;
    if (doc.contains("coefficients")) {
        const json& c = doc["coefficients"];
        check_keys(c, "coefficients", {"axial", "lateral", "bending"});
        if (c.contains("axial")) {
            const json& a = c["axial"];
            if (!a.is_array() || a.size() != 2) {
                fail("coefficients.axial", "expected [a, b]");
            }
            coeffs.axial = InverseLawCoeffs{a[0].get<double>(), a[1].get<double>()};
        }
        auto quad = [](const json& q, const char* where) {
            if (!q.is_array() || q.size() != 3) {
                fail(where, "expected [c2, c1, c0]");
            }
            return QuadCoeffs{q[0].get<double>(), q[1].get<double>(),
                              q[2].get<double>()};
        };
        if (c.contains("lateral")) {
            coeffs.lateral = quad(c["lateral"], "coefficients.lateral");
        }
        if (c.contains("bending")) {
            coeffs.bending = quad(c["bending"], "coefficients.bending");
        }
    }
    try {
        coeffs.validate();
    } catch (const std::domain_error& e) {
        fail("coefficients", e.what());
    }

    const json& g = doc.contains("geometry") ? doc["geometry"] : json::object();
    check_keys(g, "geometry",
               {"side_length_mm", "dielectric_thickness_mm", "base_capacitance_pf",
                "bend_inner_radius_mm", "m_lateral", "m_bend"});
    const TaxelGeometry& fg = fallback.geometry;
    TaxelGeometry geometry = [&] {
        try {
            return TaxelGeometry::from_base_capacitance(
                get_number(g, "geometry", "side_length_mm", fg.side_length_mm),
                get_number(g, "geometry", "dielectric_thickness_mm",
                           fg.dielectric_thickness_mm),
                get_number(g, "geometry", "base_capacitance_pf",
                           fg.base_capacitance_pf),
                get_number(g, "geometry", "bend_inner_radius_mm",
                           fg.bend_inner_radius_mm),
                get_number(g, "geometry", "m_lateral", fg.m_lateral),
                get_number(g, "geometry", "m_bend", fg.m_bend));
        } catch (const std::domain_error& e) {
            fail("geometry", e.what());
        }
    }();

    const json& s = doc.contains("stiffness") ? doc["stiffness"] : json::object();
    check_keys(s, "stiffness",
               {"max_deflection_fraction", "force_constant_n", "target_dc_pf",
                "target_force_n"});
    const double fraction =
        get_number(s, "stiffness", "max_deflection_fraction", 0.8);
    StiffnessProfile stiffness = [&] {
        try {
            if (s.contains("force_constant_n") &&
                s["force_constant_n"].is_number()) {
                if (fraction <= 0.0 || fraction >= 1.0) {
                    fail("stiffness.max_deflection_fraction",
                         "must lie in (0, 1)");
                }
                return StiffnessProfile{
                    fraction * geometry.dielectric_thickness_mm,
                    s["force_constant_n"].get<double>()};
            }
            if (s.contains("force_constant_n") &&
                s["force_constant_n"] != json("auto")) {
                fail("stiffness.force_constant_n", "expected a number or 'auto'");
            }
            return StiffnessProfile::tuned(
                geometry, coeffs, get_number(s, "stiffness", "target_dc_pf", 5.0),
                get_number(s, "stiffness", "target_force_n", 55.0), fraction);
        } catch (const std::domain_error& e) {
            fail("stiffness", e.what());
        }
    }();

    SensorModel model{geometry, coeffs, stiffness,
                      get_number(doc, "top level", "stretch_sensitivity",
                                 fallback.stretch_sensitivity)};
    if (model.stretch_sensitivity < 0.0 || model.stretch_sensitivity > 1.0) {
        fail("stretch_sensitivity", "must lie in [0, 1]");
    }
    return model;
}

ChannelSettings parse_channel(const json& doc, const SensorModel& model) {
    ChannelSettings settings;

    const json& ch = doc.contains("channel") ? doc["channel"] : json::object();
    check_keys(ch, "channel",
               {"shielding", "noise_fractions", "measuring_range_pf", "clamp_pf",
                "quantum_pf", "sample_rate_hz", "rng_seed"});
    SensorChannelConfig& cfg = settings.channel;
    cfg.shielding = parse_shielding(
        get_string(ch, "channel", "shielding", "active_passive"),
        "channel.shielding");
    if (ch.contains("noise_fractions")) {
        const json& nf = ch["noise_fractions"];
        check_keys(nf, "channel.noise_fractions",
                   {"unshielded", "active_only", "active_passive"});
        cfg.noise_fractions[0] = get_number(nf, "channel.noise_fractions",
                                            "unshielded", cfg.noise_fractions[0]);
        cfg.noise_fractions[1] = get_number(nf, "channel.noise_fractions",
                                            "active_only", cfg.noise_fractions[1]);
        cfg.noise_fractions[2] =
            get_number(nf, "channel.noise_fractions", "active_passive",
                       cfg.noise_fractions[2]);
    }
    cfg.measuring_range_pf =
        get_number(ch, "channel", "measuring_range_pf", cfg.measuring_range_pf);
    cfg.clamp_pf = get_number(ch, "channel", "clamp_pf", cfg.clamp_pf);
    cfg.quantum_pf = get_number(ch, "channel", "quantum_pf", cfg.quantum_pf);
    cfg.sample_rate_hz =
        get_number(ch, "channel", "sample_rate_hz", cfg.sample_rate_hz);
    cfg.rng_seed = static_cast<std::uint64_t>(
        get_integer(ch, "channel", "rng_seed", static_cast<long>(cfg.rng_seed)));
    try {
        cfg.validate();
    } catch (const std::domain_error& e) {
        fail("channel", e.what());
    }

    const json& dyn = doc.contains("dynamics") ? doc["dynamics"] : json::object();
    check_keys(dyn, "dynamics", {"noise", "hysteresis", "quantization", "drift"});
    settings.toggles.noise = get_bool(dyn, "dynamics", "noise", true);
    settings.toggles.hysteresis = get_bool(dyn, "dynamics", "hysteresis", true);
    settings.toggles.quantization = get_bool(dyn, "dynamics", "quantization", true);
    settings.toggles.drift = get_bool(dyn, "dynamics", "drift", false);

    const json& hy = doc.contains("hysteresis") ? doc["hysteresis"] : json::object();
    check_keys(hy, "hysteresis", {"loop_gap_fraction", "relaxation_rate_hz"});
    settings.loop_gap_fraction =
        get_number(hy, "hysteresis", "loop_gap_fraction", 0.054);
    if (settings.loop_gap_fraction < 0.0 || settings.loop_gap_fraction > 0.2) {
        fail("hysteresis.loop_gap_fraction", "must lie in [0, 0.2]");
    }
    if (hy.contains("relaxation_rate_hz")) {
        const json& rate = hy["relaxation_rate_hz"];
        if (rate.is_number()) {
            settings.relaxation_rate_hz = rate.get<double>();
            if (settings.relaxation_rate_hz <= 0.0) {
                fail("hysteresis.relaxation_rate_hz", "must be positive");
            }
        } else if (rate == json("auto")) {
            settings.relaxation_rate_hz = tune_hysteresis_rate(
                model.geometry, model.coeffs, model.stiffness,
                settings.loop_gap_fraction);
        } else if (rate == json("default")) {
            settings.relaxation_rate_hz = HysteresisState::kDefaultHysteresisRate;
        } else {
            fail("hysteresis.relaxation_rate_hz",
                 "expected a number, 'auto' or 'default'");
        }
    }

    const json& dr = doc.contains("drift") ? doc["drift"] : json::object();
    check_keys(dr, "drift", {"gain_decay_per_1000"});
    settings.gain_decay_per_1000 =
        get_number(dr, "drift", "gain_decay_per_1000", 0.00054);
    if (settings.gain_decay_per_1000 < 0.0 || settings.gain_decay_per_1000 > 1.0) {
        fail("drift.gain_decay_per_1000", "must lie in [0, 1]");
    }
    return settings;
}

SkinTopology parse_topology(const json& doc) {
    if (!doc.contains("topology") || doc["topology"] == json("reference")) {
        return build_reference_topology();
    }
    const json& t = doc["topology"];
    check_keys(t, "topology", {"sections"});
    if (!t.contains("sections") || !t["sections"].is_array() ||
        t["sections"].empty()) {
        fail("topology.sections", "expected a non-empty array");
    }
    SkinTopology topo;
    int next = 0;
    for (std::size_t i = 0; i < t["sections"].size(); ++i) {
        const json& s = t["sections"][i];
        const std::string where = "topology.sections[" + std::to_string(i) + "]";
        check_keys(s, where, {"link", "rows", "cols", "count", "pitch_mm"});
        const std::string link = get_string(s, where, "link", "");
        if (link.empty()) {
            fail(where + ".link", "required");
        }
        const long rows = get_integer(s, where, "rows", 0);
        const long cols = get_integer(s, where, "cols", 0);
        const long count = get_integer(s, where, "count", rows * cols);
        const double pitch = get_number(s, where, "pitch_mm", 30.0);
        try {
            topo.sections.push_back(make_grid_section(
                link, static_cast<int>(rows), static_cast<int>(cols),
                static_cast<int>(count), pitch, next));
        } catch (const std::domain_error& e) {
            fail(where, e.what());
        }
        next += static_cast<int>(count);
    }
    topo.total_taxel_count = next;
    try {
        topo.validate();
    } catch (const std::domain_error& e) {
        fail("topology", e.what());
    }
    return topo;
}

std::vector<ContactSpec> parse_contacts(const json& doc,
                                        const SkinTopology& topo) {
    std::vector<ContactSpec> contacts;
    if (!doc.contains("contacts")) {
        return contacts;
    }
    if (!doc["contacts"].is_array()) {
        fail("contacts", "expected an array");
    }
    for (std::size_t i = 0; i < doc["contacts"].size(); ++i) {
        const json& c = doc["contacts"][i];
        const std::string where = "contacts[" + std::to_string(i) + "]";
        check_keys(c, where,
                   {"link", "center_mm", "radius_mm", "duration_s",
                    "force_profile_n"});
        ContactSpec spec;
        spec.link_id = get_string(c, where, "link", "");
        if (topo.find_link(spec.link_id) == nullptr) {
            fail(where + ".link", "unknown link '" + spec.link_id + "'");
        }
        if (!c.contains("center_mm") || !c["center_mm"].is_array() ||
            c["center_mm"].size() != 2) {
            fail(where + ".center_mm", "expected [u, v]");
        }
        spec.center_u_mm = c["center_mm"][0].get<double>();
        spec.center_v_mm = c["center_mm"][1].get<double>();
        spec.footprint_radius_mm = get_number(c, where, "radius_mm", 0.0);
        spec.duration_s = get_number(c, where, "duration_s", 0.0);
        if (!c.contains("force_profile_n") || !c["force_profile_n"].is_array()) {
            fail(where + ".force_profile_n", "expected an array of forces");
        }
        for (const json& f : c["force_profile_n"]) {
            spec.force_profile_n.push_back(f.get<double>());
        }
        try {
            spec.validate();
        } catch (const std::domain_error& e) {
            fail(where, e.what());
        }
        contacts.push_back(std::move(spec));
    }
    return contacts;
}

CharacterizationParams parse_characterization(const json& doc,
                                              const SkinTopology& topo) {
    CharacterizationParams p;
    if (!doc.contains("characterization")) {
        return p;
    }
    const json& c = doc["characterization"];
    check_keys(c, "characterization",
               {"sweep_max_n", "sweep_points", "averaging_window", "settle_time_s",
                "noise_samples", "calibration_cycles", "cycle_period_s",
                "cycle_peak_n", "calibration_knots", "durability_presses",
                "probe_taxel"});
    p.sweep_max_n = get_number(c, "characterization", "sweep_max_n", p.sweep_max_n);
    p.sweep_points = static_cast<int>(
        get_integer(c, "characterization", "sweep_points", p.sweep_points));
    p.averaging_window = static_cast<int>(get_integer(
        c, "characterization", "averaging_window", p.averaging_window));
    p.settle_time_s =
        get_number(c, "characterization", "settle_time_s", p.settle_time_s);
    p.noise_samples =
        get_integer(c, "characterization", "noise_samples", p.noise_samples);
    p.calibration_cycles = static_cast<int>(get_integer(
        c, "characterization", "calibration_cycles", p.calibration_cycles));
    p.cycle_period_s =
        get_number(c, "characterization", "cycle_period_s", p.cycle_period_s);
    p.cycle_peak_n =
        get_number(c, "characterization", "cycle_peak_n", p.cycle_peak_n);
    p.calibration_knots = static_cast<int>(get_integer(
        c, "characterization", "calibration_knots", p.calibration_knots));
    p.durability_presses = static_cast<int>(get_integer(
        c, "characterization", "durability_presses", p.durability_presses));
    p.probe_taxel = static_cast<int>(
        get_integer(c, "characterization", "probe_taxel", p.probe_taxel));
    if (p.sweep_points < 2 || p.averaging_window < 1 || p.noise_samples < 100 ||
        p.calibration_cycles < 1 || p.calibration_knots < 2 ||
        p.durability_presses < 1 || p.sweep_max_n <= 0.0 ||
        p.cycle_period_s <= 0.0 || p.cycle_peak_n <= 0.0 || p.settle_time_s < 0.0) {
        fail("characterization", "parameter out of range");
    }
    if (p.probe_taxel < 0 || p.probe_taxel >= topo.total_taxel_count) {
        fail("characterization.probe_taxel", "outside the topology");
    }
    return p;
}

} // namespace

void RunConfig::validate() const {
    try {
        model.coeffs.validate();
        topology.validate();
        channel.channel.validate();
        for (const ContactSpec& c : contacts) {
            c.validate();
        }
    } catch (const std::domain_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

RunConfig default_run_config() {
    RunConfig config{SensorModel::reference(), ChannelSettings{},
                     build_reference_topology(), {}, CharacterizationParams{},
                     "out"};
    config.channel.channel.sample_rate_hz = 200.0;
    return config;
}

RunConfig parse_config(const json& doc) {
    check_keys(doc, "top level",
               {"units", "geometry", "coefficients", "stretch_sensitivity",
                "stiffness", "channel", "dynamics", "hysteresis", "drift",
                "topology", "contacts", "characterization", "output_dir"});
    parse_units(doc);
    RunConfig config = default_run_config();
    config.model = parse_model(doc);
    config.channel = parse_channel(doc, config.model);
    config.topology = parse_topology(doc);
    config.contacts = parse_contacts(doc, config.topology);
    config.characterization = parse_characterization(doc, config.topology);
    config.output_dir = get_string(doc, "top level", "output_dir", "out");
    config.validate();
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open '" + path.string() + "'");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: " + path.string() + ": " + e.what());
    }
    return parse_config(doc);
}

json config_to_json(const RunConfig& config) {
    json doc;
    doc["units"] = {{"length", "mm"},
                    {"capacitance", "pF"},
                    {"force", "N"},
                    {"angle", "rad"}};
    const TaxelGeometry& g = config.model.geometry;
    doc["geometry"] = {{"side_length_mm", g.side_length_mm},
                       {"dielectric_thickness_mm", g.dielectric_thickness_mm},
                       {"base_capacitance_pf", g.base_capacitance_pf},
                       {"bend_inner_radius_mm", g.bend_inner_radius_mm},
                       {"m_lateral", g.m_lateral},
                       {"m_bend", g.m_bend}};
    const FittedCoefficients& fc = config.model.coeffs;
    doc["coefficients"] = {
        {"axial", {fc.axial.a, fc.axial.b}},
        {"lateral", {fc.lateral.c2, fc.lateral.c1, fc.lateral.c0}},
        {"bending", {fc.bending.c2, fc.bending.c1, fc.bending.c0}}};
    doc["stretch_sensitivity"] = config.model.stretch_sensitivity;
    doc["stiffness"] = {
        {"max_deflection_fraction",
         config.model.stiffness.max_deflection_mm / g.dielectric_thickness_mm},
        {"force_constant_n", config.model.stiffness.force_constant_n}};
    const SensorChannelConfig& ch = config.channel.channel;
    doc["channel"] = {
        {"shielding", shielding_name(ch.shielding)},
        {"noise_fractions",
         {{"unshielded", ch.noise_fractions[0]},
          {"active_only", ch.noise_fractions[1]},
          {"active_passive", ch.noise_fractions[2]}}},
        {"measuring_range_pf", ch.measuring_range_pf},
        {"clamp_pf", ch.clamp_pf},
        {"quantum_pf", ch.quantum_pf},
        {"sample_rate_hz", ch.sample_rate_hz},
        {"rng_seed", ch.rng_seed}};
    doc["dynamics"] = {{"noise", config.channel.toggles.noise},
                       {"hysteresis", config.channel.toggles.hysteresis},
                       {"quantization", config.channel.toggles.quantization},
                       {"drift", config.channel.toggles.drift}};
    doc["hysteresis"] = {{"loop_gap_fraction", config.channel.loop_gap_fraction},
                         {"relaxation_rate_hz", config.channel.relaxation_rate_hz}};
    doc["drift"] = {{"gain_decay_per_1000", config.channel.gain_decay_per_1000}};
    json sections = json::array();
    for (const SkinSection& s : config.topology.sections) {
        sections.push_back({{"link", s.link_id},
                            {"rows", s.grid_rows},
                            {"cols", s.grid_cols},
                            {"count", s.taxels.size()},
                            {"pitch_mm", s.taxel_pitch_mm}});
    }
    doc["topology"] = {{"sections", sections}};
    json contacts = json::array();
    for (const ContactSpec& c : config.contacts) {
        contacts.push_back({{"link", c.link_id},
                            {"center_mm", {c.center_u_mm, c.center_v_mm}},
                            {"radius_mm", c.footprint_radius_mm},
                            {"duration_s", c.duration_s},
                            {"force_profile_n", c.force_profile_n}});
    }
    doc["contacts"] = contacts;
    const CharacterizationParams& p = config.characterization;
    doc["characterization"] = {{"sweep_max_n", p.sweep_max_n},
                               {"sweep_points", p.sweep_points},
                               {"averaging_window", p.averaging_window},
                               {"settle_time_s", p.settle_time_s},
                               {"noise_samples", p.noise_samples},
                               {"calibration_cycles", p.calibration_cycles},
                               {"cycle_period_s", p.cycle_period_s},
                               {"cycle_peak_n", p.cycle_peak_n},
                               {"calibration_knots", p.calibration_knots},
                               {"durability_presses", p.durability_presses},
                               {"probe_taxel", p.probe_taxel}};
    doc["output_dir"] = config.output_dir;
    return doc;
}

json topology_to_json(const SkinTopology& topo) {
    json doc;
    doc["total_taxel_count"] = topo.total_taxel_count;
    json sections = json::array();
    for (const SkinSection& s : topo.sections) {
        json taxels = json::array();
        for (const TaxelPlacement& t : s.taxels) {
            const TaxelAddress a = taxel_address(t.index);
            taxels.push_back({{"index", t.index},
                              {"row", t.row},
                              {"col", t.col},
                              {"u_mm", t.u_mm},
                              {"v_mm", t.v_mm},
                              {"mux", a.mux},
                              {"cdc", a.cdc},
                              {"channel", a.channel}});
        }
        sections.push_back({{"link", s.link_id},
                            {"rows", s.grid_rows},
                            {"cols", s.grid_cols},
                            {"pitch_mm", s.taxel_pitch_mm},
                            {"taxels", taxels}});
    }
    doc["sections"] = sections;
    return doc;
}

} // namespace skinsim
