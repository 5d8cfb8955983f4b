#include "disac/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace disac {

namespace {

constexpr double kReferenceRange = 100.0;  // m, Table II node-target range

bool finite(const Vec3& p) {
    return std::isfinite(p.x()) && std::isfinite(p.y()) && std::isfinite(p.z());
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

double freespace_downlink_gain(double wavelength, double distance) {
    double x = wavelength / (4.0 * kPi * distance);
    return x * x;
}

double freespace_bistatic_gain(double wavelength, double d_tx, double d_rx) {
    double fourpi = 4.0 * kPi;
    return wavelength * wavelength /
           (fourpi * fourpi * fourpi * d_tx * d_tx * d_rx * d_rx);
}

void ScenarioConfig::validate() const {
    if (num_nodes < 1) throw DisacError("config: num_nodes must be positive");
    if (tx_antennas < 1 || rx_antennas < 1) throw DisacError("config: antenna counts must be positive");
    if (num_ues < 1) throw DisacError("config: num_ues must be positive");
    if (node_positions.empty()) throw DisacError("config: node list is empty");
    if (static_cast<int>(node_positions.size()) != num_nodes)
        throw DisacError("config: node position count does not match num_nodes");
    if (static_cast<int>(ue_positions.size()) != num_ues)
        throw DisacError("config: UE position count does not match num_ues");
    for (const auto& p : node_positions)
        if (!finite(p)) throw DisacError("config: non-finite node position");
    for (const auto& p : ue_positions)
        if (!finite(p)) throw DisacError("config: non-finite UE position");
    if (!finite(target_position)) throw DisacError("config: non-finite target position");
    for (const auto& p : node_positions)
        if ((target_position - p).norm() <= 0.0)
            throw DisacError("config: node coincides with the target");
    if (!(wavelength > 0.0)) throw DisacError("config: wavelength must be positive");
    if (!(antenna_spacing > 0.0)) throw DisacError("config: antenna spacing must be positive");
    if (!(rician_factor >= 0.0)) throw DisacError("config: rician factor must be nonnegative");
    if (!(power_budget > 0.0)) throw DisacError("config: power budget must be positive");
    if (!(comm_noise > 0.0)) throw DisacError("config: comm noise must be positive");
    if (!(sensing_noise > 0.0)) throw DisacError("config: sensing noise must be positive");
    if (!(sync_error_bound >= 0.0 && sync_error_bound < 0.5))
        throw DisacError("config: sync error bound must lie in [0, 0.5)");
    if (!(aoa_half_width >= 0.0)) throw DisacError("config: AoA half width must be nonnegative");
    if (!(sinr_threshold > 0.0)) throw DisacError("config: SINR threshold must be positive");
    if (snapshots < 1) throw DisacError("config: snapshots must be positive");
    if (!(sca_tolerance > 0.0)) throw DisacError("config: SCA tolerance must be positive");
    if (sca_max_iterations < 1) throw DisacError("config: SCA iteration cap must be positive");
    if (rcs_model.kind == RcsModel::Kind::ChiSquare && !(rcs_model.chi_square_shape > 0.0))
        throw DisacError("config: chi-square shape must be positive");
    if (rcs_profile.empty()) throw DisacError("config: RCS profile is empty");
    if (!std::isfinite(target_heading)) throw DisacError("config: non-finite target heading");
    for (const auto& c : clutter) {
        if (c.node_rx < 0 || c.node_rx >= num_nodes || c.node_tx < 0 || c.node_tx >= num_nodes)
            throw DisacError("config: clutter node index out of range");
        if (c.power_w < 0.0) throw DisacError("config: negative clutter power");
    }
}

GeometrySummary derive_geometry(const ScenarioConfig& cfg) {
    GeometrySummary g;
    const int n_nodes = cfg.num_nodes;
    const int n_ues = cfg.num_ues;
    g.node_ue_angle.resize(n_nodes * n_ues);
    g.node_ue_distance.resize(n_nodes * n_ues);
    g.node_target_angle.resize(n_nodes);
    g.node_target_distance.resize(n_nodes);
    g.target_node_aspect.resize(n_nodes);

    auto azimuth = [](const Vec3& from, const Vec3& to) {
        double a = std::atan2(to.y() - from.y(), to.x() - from.x());
        return a <= -kPi ? kPi : a;
    };

    for (int n = 0; n < n_nodes; ++n) {
        const Vec3& pn = cfg.node_positions[n];
        double d = (cfg.target_position - pn).norm();
        if (d <= 1e-9) throw DisacError("derive_geometry: node coincides with target");
        g.node_target_distance[n] = d;
        g.node_target_angle[n] = azimuth(pn, cfg.target_position);
        g.target_node_aspect[n] = azimuth(cfg.target_position, pn);
        for (int k = 0; k < n_ues; ++k) {
            const Vec3& pk = cfg.ue_positions[k];
            double duk = (pk - pn).norm();
            if (duk <= 1e-6) throw DisacError("derive_geometry: UE coincides with node");
            g.node_ue_distance[n * n_ues + k] = duk;
            g.node_ue_angle[n * n_ues + k] = azimuth(pn, pk);
        }
    }
    return g;
}

RandomStream spawn_rng_stream(const ScenarioConfig& cfg, const std::string& label) {
    return RandomStream(cfg.seed, label);
}

void draw_ue_positions(ScenarioConfig& cfg, double box_m) {
    RandomStream rng(cfg.seed, "ue_positions");
    cfg.ue_positions.clear();
    for (int k = 0; k < cfg.num_ues; ++k) {
        double x = rng.uniform(-0.5 * box_m, 0.5 * box_m);
        double y = rng.uniform(-0.5 * box_m, 0.5 * box_m);
        cfg.ue_positions.emplace_back(x, y, 0.0);
    }
}

std::vector<ClutterPoint> default_clutter(const ScenarioConfig& cfg,
                                          const GeometrySummary& geom,
                                          double offset_rad, double cnr) {
    std::vector<ClutterPoint> out;
    for (int n = 0; n < cfg.num_nodes; ++n)
        for (int m = 0; m < cfg.num_nodes; ++m)
            out.push_back({n, m, wrap_angle(geom.node_target_angle[n] + offset_rad),
                           cnr * cfg.sensing_noise});
    return out;
}

namespace {

void place_nodes_on_circle(ScenarioConfig& cfg, double radius) {
    cfg.node_positions.clear();
    for (int n = 0; n < cfg.num_nodes; ++n) {
        double a = 2.0 * kPi * n / cfg.num_nodes;
        cfg.node_positions.emplace_back(cfg.target_position.x() + radius * std::cos(a),
                                        cfg.target_position.y() + radius * std::sin(a), 0.0);
    }
}

}  // namespace

ScenarioConfig default_table2_config(int num_nodes, std::uint64_t seed) {
    ScenarioConfig cfg;
    cfg.num_nodes = num_nodes;
    cfg.tx_antennas = 12;
    cfg.rx_antennas = 12;
    cfg.num_ues = 3;
    cfg.wavelength = 0.03;
    cfg.antenna_spacing = cfg.wavelength / 2.0;
    cfg.rician_factor = db_to_linear(5.0);
    cfg.power_budget = 1.0;
    // Table II fixes P_max / sigma^2 = 30 dB; the noise floors are referenced
    // to the free-space gains at the 100 m node-target range so the budget
    // means the same thing it does with normalized channels.
    cfg.comm_noise = cfg.power_budget * freespace_downlink_gain(cfg.wavelength, kReferenceRange) * 1e-3;
    cfg.sensing_noise = cfg.power_budget *
                        freespace_bistatic_gain(cfg.wavelength, kReferenceRange, kReferenceRange) * 1e-3;
    cfg.sync_error_bound = 0.01;
    cfg.aoa_half_width = deg_to_rad(2.0);
    cfg.sinr_threshold = db_to_linear(10.0);
    cfg.snapshots = 100;
    cfg.sca_tolerance = 0.01;
    cfg.rcs_model = RcsModel::chi_square(4.0);
    cfg.rcs_profile = RcsProfile::default_two_lobe();
    cfg.target_heading = 0.0;
    cfg.target_position = Vec3::Zero();
    cfg.seed = seed;
    place_nodes_on_circle(cfg, kReferenceRange);
    draw_ue_positions(cfg, 200.0);
    cfg.clutter = default_clutter(cfg, derive_geometry(cfg), deg_to_rad(20.0), db_to_linear(10.0));
    return cfg;
}

ScenarioConfig desk_scale_config(int num_nodes, int antennas_per_node, int num_ues,
                                 std::uint64_t seed) {
    ScenarioConfig cfg = default_table2_config(num_nodes, seed);
    cfg.tx_antennas = antennas_per_node;
    cfg.rx_antennas = antennas_per_node;
    cfg.num_ues = num_ues;
    draw_ue_positions(cfg, 200.0);
    return cfg;
}

// ---------------------------------------------------------------------------
// Config file format: `key = value` lines, '#' comments, repeated keys for
// lists. Angles accept `_deg` or `_rad` suffixed keys; the serializer emits
// `_rad` so that serialize/parse round-trips are bit-exact.
// ---------------------------------------------------------------------------

namespace {

struct RawConfig {
    std::vector<std::pair<std::string, std::string>> entries;
    bool has(const std::string& k) const {
        for (auto& e : entries)
            if (e.first == k) return true;
        return false;
    }
    const std::string* get(const std::string& k) const {
        const std::string* out = nullptr;
        for (auto& e : entries)
            if (e.first == k) out = &e.second;
        return out;
    }
};

double to_double(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw DisacError("config: bad numeric value for " + key + ": '" + s + "'");
    }
}

long long to_int(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw DisacError("config: bad integer value for " + key + ": '" + s + "'");
    }
}

std::vector<double> split_numbers(const std::string& s, const std::string& key) {
    std::string t = s;
    std::replace(t.begin(), t.end(), ',', ' ');
    std::istringstream ss(t);
    std::vector<double> out;
    double v;
    while (ss >> v) out.push_back(v);
    if (!ss.eof()) throw DisacError("config: bad list value for " + key + ": '" + s + "'");
    return out;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& base_dir) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DisacError("config: line " + std::to_string(lineno) + " has no '='");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw DisacError("config: empty key on line " + std::to_string(lineno));
        raw.entries.emplace_back(key, val);
    }

    ScenarioConfig cfg;
    cfg.node_positions.clear();
    cfg.ue_positions.clear();
    std::vector<double> profile_angles, profile_means;
    double node_circle_radius = -1.0, ue_box = -1.0;
    double budget_comm_db = std::nan(""), budget_sensing_db = std::nan("");
    double clutter_offset_deg = std::nan(""), clutter_cnr_db = std::nan("");
    bool explicit_clutter = false;

    for (const auto& [key, val] : raw.entries) {
        if (key == "num_nodes") cfg.num_nodes = static_cast<int>(to_int(val, key));
        else if (key == "tx_antennas") cfg.tx_antennas = static_cast<int>(to_int(val, key));
        else if (key == "rx_antennas") cfg.rx_antennas = static_cast<int>(to_int(val, key));
        else if (key == "num_ues") cfg.num_ues = static_cast<int>(to_int(val, key));
        else if (key == "node") {
            auto v = split_numbers(val, key);
            if (v.size() != 2 && v.size() != 3) throw DisacError("config: node needs x,y[,z]");
            cfg.node_positions.emplace_back(v[0], v[1], v.size() == 3 ? v[2] : 0.0);
        } else if (key == "ue") {
            auto v = split_numbers(val, key);
            if (v.size() != 2 && v.size() != 3) throw DisacError("config: ue needs x,y[,z]");
            cfg.ue_positions.emplace_back(v[0], v[1], v.size() == 3 ? v[2] : 0.0);
        } else if (key == "target") {
            auto v = split_numbers(val, key);
            if (v.size() != 3) throw DisacError("config: target needs x,y,z");
            cfg.target_position = Vec3(v[0], v[1], v[2]);
        } else if (key == "node_circle_radius_m") node_circle_radius = to_double(val, key);
        else if (key == "ue_box_m") ue_box = to_double(val, key);
        else if (key == "wavelength_m") cfg.wavelength = to_double(val, key);
        else if (key == "antenna_spacing_m") cfg.antenna_spacing = to_double(val, key);
        else if (key == "rician_factor_db") cfg.rician_factor = db_to_linear(to_double(val, key));
        else if (key == "rician_factor") cfg.rician_factor = to_double(val, key);
        else if (key == "power_budget_w") cfg.power_budget = to_double(val, key);
        else if (key == "comm_noise_w") cfg.comm_noise = to_double(val, key);
        else if (key == "sensing_noise_w") cfg.sensing_noise = to_double(val, key);
        else if (key == "budget_comm_db") budget_comm_db = to_double(val, key);
        else if (key == "budget_sensing_db") budget_sensing_db = to_double(val, key);
        else if (key == "sync_error_bound") cfg.sync_error_bound = to_double(val, key);
        else if (key == "aoa_half_width_deg") cfg.aoa_half_width = deg_to_rad(to_double(val, key));
        else if (key == "aoa_half_width_rad") cfg.aoa_half_width = to_double(val, key);
        else if (key == "sinr_threshold_db") cfg.sinr_threshold = db_to_linear(to_double(val, key));
        else if (key == "sinr_threshold") cfg.sinr_threshold = to_double(val, key);
        else if (key == "snapshots") cfg.snapshots = static_cast<int>(to_int(val, key));
        else if (key == "sca_tolerance") cfg.sca_tolerance = to_double(val, key);
        else if (key == "sca_max_iterations") cfg.sca_max_iterations = static_cast<int>(to_int(val, key));
        else if (key == "rcs_model") {
            if (val == "swerling1") cfg.rcs_model = RcsModel::swerling_one();
            else if (val.rfind("chisquare", 0) == 0) {
                double shape = 4.0;
                auto colon = val.find(':');
                if (colon != std::string::npos) shape = to_double(val.substr(colon + 1), key);
                cfg.rcs_model = RcsModel::chi_square(shape);
            } else throw DisacError("config: unknown rcs_model '" + val + "'");
        } else if (key == "rcs_profile_csv") {
            std::filesystem::path p(val);
            if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
            cfg.rcs_profile = RcsProfile::from_csv(p.string());
        } else if (key == "rcs_profile_point") {
            auto v = split_numbers(val, key);
            if (v.size() != 2) throw DisacError("config: rcs_profile_point needs angle,mean");
            profile_angles.push_back(v[0]);
            profile_means.push_back(v[1]);
        } else if (key == "target_heading_deg") cfg.target_heading = deg_to_rad(to_double(val, key));
        else if (key == "target_heading_rad") cfg.target_heading = to_double(val, key);
        else if (key == "clutter") {
            auto v = split_numbers(val, key);
            if (v.size() != 4) throw DisacError("config: clutter needs rx,tx,angle_rad,power_w");
            cfg.clutter.push_back({static_cast<int>(v[0]), static_cast<int>(v[1]), v[2], v[3]});
            explicit_clutter = true;
        } else if (key == "clutter_auto") {
            auto v = split_numbers(val, key);
            if (v.size() != 2) throw DisacError("config: clutter_auto needs offset_deg,cnr_db");
            clutter_offset_deg = v[0];
            clutter_cnr_db = v[1];
        } else if (key == "sinr_numerator") {
            if (val == "nominal") cfg.sinr_numerator = SinrNumeratorMode::Nominal;
            else if (val == "conservative") cfg.sinr_numerator = SinrNumeratorMode::Conservative;
            else throw DisacError("config: unknown sinr_numerator '" + val + "'");
        } else if (key == "sync_mode") {
            if (val == "shrinkage") cfg.sync_mode = SyncMode::Shrinkage;
            else if (val == "sampled") cfg.sync_mode = SyncMode::SampledPhases;
            else throw DisacError("config: unknown sync_mode '" + val + "'");
        } else if (key == "rcs_per_snapshot") cfg.rcs_fluctuates_per_snapshot = to_int(val, key) != 0;
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(val, key));
        else throw DisacError("config: unknown key '" + key + "'");
    }

    if (!profile_angles.empty()) {
        std::vector<double> rad(profile_angles.size());
        // Inline profile points are written in radians by the serializer and
        // accepted in degrees via magnitude: values beyond pi are degrees.
        bool degrees = false;
        for (double a : profile_angles)
            if (std::abs(a) > kPi + 1e-9) degrees = true;
        for (std::size_t i = 0; i < profile_angles.size(); ++i)
            rad[i] = degrees ? deg_to_rad(profile_angles[i]) : profile_angles[i];
        cfg.rcs_profile = RcsProfile(rad, profile_means);
    } else if (cfg.rcs_profile.empty()) {
        cfg.rcs_profile = RcsProfile::default_two_lobe();
    }

    if (cfg.node_positions.empty()) {
        if (node_circle_radius <= 0.0) node_circle_radius = kReferenceRange;
        place_nodes_on_circle(cfg, node_circle_radius);
    }
    if (cfg.ue_positions.empty()) {
        if (ue_box <= 0.0) ue_box = 200.0;
        draw_ue_positions(cfg, ue_box);
    }
    if (!std::isnan(budget_comm_db))
        cfg.comm_noise = cfg.power_budget * freespace_downlink_gain(cfg.wavelength, kReferenceRange) *
                         db_to_linear(-budget_comm_db);
    if (!std::isnan(budget_sensing_db))
        cfg.sensing_noise = cfg.power_budget *
                            freespace_bistatic_gain(cfg.wavelength, kReferenceRange, kReferenceRange) *
                            db_to_linear(-budget_sensing_db);
    if (!explicit_clutter) {
        double offset = std::isnan(clutter_offset_deg) ? 20.0 : clutter_offset_deg;
        double cnr = std::isnan(clutter_cnr_db) ? 10.0 : clutter_cnr_db;
        cfg.clutter = default_clutter(cfg, derive_geometry(cfg), deg_to_rad(offset), db_to_linear(cnr));
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DisacError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::string serialize_config(const ScenarioConfig& cfg) {
    std::ostringstream out;
    out << "# disac scenario\n";
    out << "num_nodes = " << cfg.num_nodes << "\n";
    out << "tx_antennas = " << cfg.tx_antennas << "\n";
    out << "rx_antennas = " << cfg.rx_antennas << "\n";
    out << "num_ues = " << cfg.num_ues << "\n";
    for (const auto& p : cfg.node_positions)
        out << "node = " << fmt(p.x()) << ", " << fmt(p.y()) << ", " << fmt(p.z()) << "\n";
    for (const auto& p : cfg.ue_positions)
        out << "ue = " << fmt(p.x()) << ", " << fmt(p.y()) << ", " << fmt(p.z()) << "\n";
    out << "target = " << fmt(cfg.target_position.x()) << ", " << fmt(cfg.target_position.y())
        << ", " << fmt(cfg.target_position.z()) << "\n";
    out << "wavelength_m = " << fmt(cfg.wavelength) << "\n";
    out << "antenna_spacing_m = " << fmt(cfg.antenna_spacing) << "\n";
    out << "rician_factor = " << fmt(cfg.rician_factor) << "\n";
    out << "power_budget_w = " << fmt(cfg.power_budget) << "\n";
    out << "comm_noise_w = " << fmt(cfg.comm_noise) << "\n";
    out << "sensing_noise_w = " << fmt(cfg.sensing_noise) << "\n";
    out << "sync_error_bound = " << fmt(cfg.sync_error_bound) << "\n";
    out << "aoa_half_width_rad = " << fmt(cfg.aoa_half_width) << "\n";
    out << "sinr_threshold = " << fmt(cfg.sinr_threshold) << "\n";
    out << "snapshots = " << cfg.snapshots << "\n";
    out << "sca_tolerance = " << fmt(cfg.sca_tolerance) << "\n";
    out << "sca_max_iterations = " << cfg.sca_max_iterations << "\n";
    if (cfg.rcs_model.kind == RcsModel::Kind::SwerlingOne) out << "rcs_model = swerling1\n";
    else out << "rcs_model = chisquare:" << fmt(cfg.rcs_model.chi_square_shape) << "\n";
    for (std::size_t i = 0; i < cfg.rcs_profile.angles().size(); ++i)
        out << "rcs_profile_point = " << fmt(cfg.rcs_profile.angles()[i]) << ", "
            << fmt(cfg.rcs_profile.means()[i]) << "\n";
    out << "target_heading_rad = " << fmt(cfg.target_heading) << "\n";
    for (const auto& c : cfg.clutter)
        out << "clutter = " << c.node_rx << ", " << c.node_tx << ", " << fmt(c.angle_rad)
            << ", " << fmt(c.power_w) << "\n";
    out << "sinr_numerator = "
        << (cfg.sinr_numerator == SinrNumeratorMode::Nominal ? "nominal" : "conservative") << "\n";
    out << "sync_mode = " << (cfg.sync_mode == SyncMode::Shrinkage ? "shrinkage" : "sampled") << "\n";
    out << "rcs_per_snapshot = " << (cfg.rcs_fluctuates_per_snapshot ? 1 : 0) << "\n";
    out << "seed = " << cfg.seed << "\n";
    return out.str();
}

void save_config(const ScenarioConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DisacError("config: cannot write " + path);
    out << serialize_config(cfg);
}

}  // namespace disac
