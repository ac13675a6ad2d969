// Headless entry point: catalog listing, mesh generation, estimations,
// requirement checks and the HTTP service.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "insitu/catalog.hpp"
#include "insitu/editor.hpp"
#include "insitu/generators.hpp"
#include "insitu/json_io.hpp"
#include "insitu/lighting.hpp"
#include "insitu/requirements.hpp"
#include "insitu/service.hpp"
#include "insitu/stability.hpp"

namespace {

using namespace insitu;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitViolation = 2;
constexpr int kExitToppled = 3;
constexpr int kExitCheckFailed = 4;

/// Exits with a code after the message has been printed.
struct Exit {
    int code;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
        throw Error(ErrorCode::IoError, "cannot write " + path);
    }
}

std::vector<double> parse_numbers(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, std::string("malformed ") + what + " '" + text + "'");
        }
    }
    return out;
}

Value parse_assignment_value(const ParameterDef& def, const std::string& text) {
    return std::visit(
        [&](const auto& kind) -> Value {
            using K = std::decay_t<decltype(kind)>;
            if constexpr (std::is_same_v<K, ContinuousKind> || std::is_same_v<K, DiscreteKind>) {
                const auto v = parse_numbers(text, "number");
                if (v.size() != 1) throw Error(ErrorCode::InvalidArgument, "'" + def.name + "' expects one number");
                if constexpr (std::is_same_v<K, DiscreteKind>) return snap_to_level(kind.levels, v[0]);
                return v[0];
            } else if constexpr (std::is_same_v<K, BooleanKind>) {
                if (text == "true" || text == "1") return true;
                if (text == "false" || text == "0") return false;
                throw Error(ErrorCode::InvalidArgument, "'" + def.name + "' expects true or false");
            } else if constexpr (std::is_same_v<K, CurveKind>) {
                return path_from_json(Json::parse(text));
            } else {
                return text;
            }
        },
        def.kind);
}

struct DesignArgs {
    std::string design;
    std::vector<std::string> sets;
    std::string position;
    double yaw = 0.0;
};

void add_design_args(CLI::App* cmd, DesignArgs& args) {
    cmd->add_option("--design", args.design, "Built-in design id")->required();
    cmd->add_option("--set", args.sets, "Parameter assignment name=value (repeatable)");
    cmd->add_option("--position", args.position, "Placement x,y,z in meters");
    cmd->add_option("--yaw", args.yaw, "Rotation about up in radians");
}

/// Applies every assignment at once, then validates the result, so the
/// outcome does not depend on the order of --set flags.
std::pair<const Design*, Configuration> configure(const DesignArgs& args) {
    const Design& design = builtin_design(args.design);
    std::vector<std::pair<std::string, Value>> assignments;
    for (const auto& s : args.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw Error(ErrorCode::InvalidArgument, "--set expects name=value, got '" + s + "'");
        }
        const std::string name = s.substr(0, eq);
        assignments.emplace_back(name, parse_assignment_value(design.at(name), s.substr(eq + 1)));
    }
    Configuration config = assign_values(design, default_configuration(design), assignments);
    Vec3 position = Vec3::Zero();
    if (!args.position.empty()) {
        const auto p = parse_numbers(args.position, "position");
        if (p.size() != 3) throw Error(ErrorCode::InvalidArgument, "--position expects x,y,z");
        position = Vec3(p[0], p[1], p[2]);
    }
    config = set_pose(config, position, args.yaw);

    const ValidityReport report = validate(design, config);
    if (!report.valid()) {
        for (const auto& v : report.violations) {
            std::cerr << "violation: " << v.parameter << ": " << v.message;
            if (v.constraint) std::cerr << " [constraint " << v.constraint->to_text() << "]";
            std::cerr << "\n";
        }
        throw Exit{kExitViolation};
    }
    return {&design, std::move(config)};
}

EnvironmentScene load_env(const std::string& path, bool z_up) {
    LoadOptions opts;
    opts.z_up = z_up;
    return load_scene(read_file(path), format_from_path(path), opts);
}

int run(int argc, char** argv) {
    CLI::App app{"Parametric design configurator: catalog, meshes, estimations and service"};
    app.require_subcommand(1);

    bool json = false;

    auto* list = app.add_subcommand("list-designs", "List the built-in designs");
    list->add_flag("--json", json, "Machine-readable output");

    DesignArgs gen_args;
    std::string out_path;
    auto* gen = app.add_subcommand("generate", "Write a binary STL for a configuration");
    add_design_args(gen, gen_args);
    gen->add_option("--out", out_path, "Output .stl path")->required();

    auto* estimate = app.add_subcommand("estimate", "Run a stability or lighting estimation");
    estimate->require_subcommand(1);

    DesignArgs stab_args;
    std::string env_path;
    bool z_up = false;
    double tilt = 0.0;
    auto* stab = estimate->add_subcommand("stability", "Drop the design onto the scan");
    add_design_args(stab, stab_args);
    stab->add_option("--env", env_path, "Environment scan (.obj or .ply)")->required();
    stab->add_option("--tilt", tilt, "Release tilt in degrees about the design's z axis");
    stab->add_flag("--z-up", z_up, "Scan uses Z as up");
    stab->add_flag("--json", json, "Machine-readable output");

    DesignArgs light_args;
    std::string light_text, raster_path;
    double extent = 2.0;
    auto* light = estimate->add_subcommand("lighting", "Point-light shadow estimation");
    add_design_args(light, light_args);
    light->add_option("--env", env_path, "Environment scan (.obj or .ply)")->required();
    light->add_option("--light", light_text, "Light x,y,z[,intensity]")->required();
    light->add_option("--raster", raster_path, "Output PGM path")->required();
    light->add_option("--extent", extent, "Raster side length in meters");
    light->add_flag("--z-up", z_up, "Scan uses Z as up");
    light->add_flag("--json", json, "Machine-readable output");

    DesignArgs check_args;
    std::string spec_path;
    auto* check = app.add_subcommand("check", "Check a configuration against a requirement spec");
    add_design_args(check, check_args);
    check->add_option("--env", env_path, "Environment scan (.obj or .ply)");
    check->add_option("--requirements", spec_path, "Requirement spec JSON")->required();
    check->add_flag("--z-up", z_up, "Scan uses Z as up");
    check->add_flag("--json", json, "Machine-readable output");

    ServiceOptions serve_opts = service_options_from_env();
    std::string snapshot;
    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--port", serve_opts.port, "Port (INSITU_PORT)");
    serve->add_option("--bind", serve_opts.bind, "Bind address (INSITU_BIND)");
    serve->add_option("--snapshot", snapshot, "Session snapshot file");
    serve->add_option("--cors-origin", serve_opts.cors_origin, "Allowed CORS origin");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    if (*list) {
        Json rows = Json::array();
        for (const auto& d : list_builtin()) {
            if (json) {
                rows.push_back({{"id", d.id}, {"name", d.title}, {"parameters", d.parameters.size()},
                                {"generator", to_string(d.generator.generator)}});
            } else {
                std::printf("%-18s %3zu  %s\n", d.id.c_str(), d.parameters.size(), d.title.c_str());
            }
        }
        if (json) std::cout << rows.dump(2) << "\n";
        return kExitOk;
    }

    if (*gen) {
        const auto [design, config] = configure(gen_args);
        const TriangleMesh mesh = generate_mesh(*design, config);
        write_file(out_path, export_stl(mesh));
        std::printf("wrote %s (%zu triangles)\n", out_path.c_str(), mesh.triangles.size());
        return kExitOk;
    }

    if (*stab) {
        const auto [design, config] = configure(stab_args);
        const EnvironmentScene scene = load_env(env_path, z_up);
        StabilityOptions opts;
        opts.release_tilt_deg = tilt;
        opts.release_tilt_axis = Eigen::AngleAxisd(config.pose.yaw, kUp) * Vec3::UnitZ();
        const StabilityReport report = estimate_stability(generate_mesh(*design, config), scene, opts);
        if (json) {
            std::cout << stability_to_json(report).dump(2) << "\n";
        } else {
            std::printf("%s: %s (tilt %.2f deg, margin %.4f m, %s)\n", design->id.c_str(),
                        report.toppled ? "toppled" : "stable", report.tilt_deg, report.quasi_static_margin,
                        report.settled ? "settled" : "did not settle");
        }
        return report.toppled ? kExitToppled : kExitOk;
    }

    if (*light) {
        const auto [design, config] = configure(light_args);
        const EnvironmentScene scene = load_env(env_path, z_up);
        const auto l = parse_numbers(light_text, "light");
        if (l.size() != 3 && l.size() != 4) throw Error(ErrorCode::InvalidArgument, "--light expects x,y,z[,intensity]");
        PointLight pl{Vec3(l[0], l[1], l[2]), l.size() == 4 ? l[3] : 1.0};
        LightingOptions opts;
        opts.raster_extent = extent;
        const LightingReport report = estimate_lighting(generate_mesh(*design, config), scene, pl, opts);
        write_file(raster_path, export_pgm(report.raster));
        if (json) {
            std::cout << lighting_to_json(report, false).dump(2) << "\n";
        } else {
            std::printf("%s: shadow coverage %.4f, mean illuminance %.6g over %zu samples; raster %s\n",
                        design->id.c_str(), report.shadow_coverage, report.mean_illuminance, report.samples.size(),
                        raster_path.c_str());
        }
        return kExitOk;
    }

    if (*check) {
        const auto [design, config] = configure(check_args);
        const RequirementSpec spec = requirement_spec_from_json(Json::parse(read_file(spec_path)));
        std::optional<EnvironmentScene> scene;
        if (!env_path.empty()) scene = load_env(env_path, z_up);
        const RequirementResult result =
            check_requirements(*design, config, generate_mesh(*design, config), scene ? &*scene : nullptr, spec);
        if (json) {
            std::cout << requirement_result_to_json(result).dump(2) << "\n";
        } else {
            for (const auto& c : result.clauses) {
                std::printf("%-4s %-18s %-6s measured %.4g, bound %.4g%s%s\n", c.label.c_str(),
                            std::string(to_string(c.kind)).c_str(), c.pass ? "pass" : "FAIL", c.measured, c.limit,
                            c.detail.empty() ? "" : ", ", c.detail.c_str());
            }
        }
        return result.all_pass() ? kExitOk : kExitCheckFailed;
    }

    if (*serve) {
        if (!snapshot.empty()) serve_opts.snapshot_path = snapshot;
        Service service(serve_opts);
        std::printf("serving on %s:%d\n", serve_opts.bind.c_str(), serve_opts.port);
        std::fflush(stdout);
        service.run();
        return kExitOk;
    }
    return kExitError;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Exit& e) {
        return e.code;
    } catch (const insitu::Error& e) {
        std::cerr << "error: " << insitu::to_string(e.code()) << ": " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}
