#include "insitu/service.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <thread>

#include "insitu/catalog.hpp"
#include "insitu/generators.hpp"
#include "insitu/json_io.hpp"

// After Eigen: <resolv.h> defines a _res macro that clashes with Eigen.
#include <httplib.h>

namespace insitu {

ServiceOptions service_options_from_env(ServiceOptions defaults) {
    if (const char* bind = std::getenv("INSITU_BIND"); bind && *bind) defaults.bind = bind;
    if (const char* port = std::getenv("INSITU_PORT"); port && *port) {
        try {
            defaults.port = std::stoi(port);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, std::string("INSITU_PORT is not a number: ") + port);
        }
    }
    return defaults;
}

namespace {

struct HttpError {
    int status;
    std::string code;
    std::string message;
};

[[noreturn]] void fail(int status, std::string code, std::string message) {
    throw HttpError{status, std::move(code), std::move(message)};
}

int status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownDesign: return 404;
        case ErrorCode::IoError: return 500;
        default: return 422;
    }
}

struct Session {
    std::string id;
    const Design* design = nullptr;
    Configuration config;
    std::optional<Configuration> preview;
    std::optional<std::string> env_id;
    std::vector<BodyProfile> profiles;
    std::uint64_t mesh_version = 1;
    std::mutex mutex;
    std::atomic<bool> simulating{false};

    const Configuration& displayed() const { return preview ? *preview : config; }
};

Json parse_body(const httplib::Request& req) {
    try {
        return req.body.empty() ? Json::object() : Json::parse(req.body);
    } catch (const Json::exception& e) {
        fail(422, "InvalidArgument", std::string("malformed JSON: ") + e.what());
    }
}

void send_json(httplib::Response& res, const Json& j, int status = 200) {
    res.status = status;
    res.set_content(j.dump(), "application/json");
}

}  // namespace

struct Service::Impl {
    ServiceOptions options;
    httplib::Server server;
    std::thread thread;
    int bound_port = 0;

    std::shared_mutex sessions_mutex;
    std::map<std::string, std::shared_ptr<Session>> sessions;
    std::map<std::string, std::shared_ptr<const EnvironmentScene>> scenes;
    std::mt19937_64 ids{std::random_device{}()};

    explicit Impl(ServiceOptions o) : options(std::move(o)) {
        routes();
        if (options.snapshot_path) load_snapshot();
    }

    std::string new_id(const char* prefix) {
        std::ostringstream os;
        os << prefix << std::hex << ids();
        return os.str();
    }

    std::shared_ptr<Session> session(const std::string& id) {
        std::shared_lock lock(sessions_mutex);
        auto it = sessions.find(id);
        if (it == sessions.end()) fail(404, "UnknownSession", "no session '" + id + "'");
        return it->second;
    }

    std::shared_ptr<const EnvironmentScene> scene(const std::string& id) {
        std::shared_lock lock(sessions_mutex);
        auto it = scenes.find(id);
        if (it == scenes.end()) fail(404, "UnknownEnvironment", "no environment '" + id + "'");
        return it->second;
    }

    std::shared_ptr<const EnvironmentScene> session_scene(const Session& s) {
        if (!s.env_id) fail(422, "NoSupportPlane", "session has no environment");
        return scene(*s.env_id);
    }

    /// Replaces the displayed configuration, bumping the version when it differs.
    static void show(Session& s, Configuration committed, std::optional<Configuration> preview) {
        const Configuration before = s.displayed();
        s.config = std::move(committed);
        s.preview = std::move(preview);
        if (!(s.displayed() == before)) ++s.mesh_version;
    }

    Json state(const Session& s) const {
        Json ranges = Json::object();
        if (!s.profiles.empty()) {
            for (const auto& def : s.design->parameters) {
                if (auto r = recommended_range(s.config, def, s.profiles)) ranges[def.name] = range_to_json(*r);
            }
        }
        Json profiles = Json::array();
        for (const auto& p : s.profiles) profiles.push_back(profile_to_json(p));
        Json j{{"id", s.id},
               {"design_id", s.design->id},
               {"config", config_to_json(s.config)},
               {"values", config_to_json(s.config)["values"]},
               {"pose", pose_to_json(s.config.pose)},
               {"validity", validity_to_json(validate(*s.design, s.config))},
               {"mesh_version", s.mesh_version},
               {"previewing", s.preview.has_value()},
               {"profiles", std::move(profiles)},
               {"recommended_ranges", std::move(ranges)}};
        if (s.env_id) j["env_id"] = *s.env_id;
        return j;
    }

    static void check_version(const Session& s, const Json& body) {
        if (body.contains("if_version")) {
            if (!body["if_version"].is_number_unsigned() || body["if_version"].get<std::uint64_t>() != s.mesh_version) {
                fail(409, "Conflict",
                     "mesh_version is " + std::to_string(s.mesh_version) + ", request expected " +
                         body["if_version"].dump());
            }
        }
    }

    template <typename Fn>
    void handle(httplib::Response& res, Fn&& fn) {
        try {
            fn();
        } catch (const HttpError& e) {
            send_json(res, {{"error", e.code}, {"message", e.message}}, e.status);
        } catch (const Error& e) {
            send_json(res, {{"error", to_string(e.code())}, {"message", e.what()}}, status_for(e.code()));
        } catch (const Json::exception& e) {
            send_json(res, {{"error", "InvalidArgument"}, {"message", e.what()}}, 422);
        } catch (const std::exception& e) {
            send_json(res, {{"error", "Internal"}, {"message", e.what()}}, 500);
        }
    }

    void routes() {
        server.set_default_headers({{"Access-Control-Allow-Origin", options.cors_origin},
                                    {"Access-Control-Allow-Methods", "GET, POST, PUT, PATCH, OPTIONS"},
                                    {"Access-Control-Allow-Headers", "Content-Type"}});
        server.set_payload_max_length(256u << 20);
        server.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

        server.Get("/designs", [this](const httplib::Request&, httplib::Response& res) {
            handle(res, [&] {
                Json list = Json::array();
                for (const auto& d : list_builtin()) list.push_back(design_summary_json(d));
                send_json(res, list);
            });
        });

        server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
            handle(res, [&] {
                const Json body = parse_body(req);
                if (!body.contains("design_id") || !body["design_id"].is_string()) {
                    fail(422, "InvalidArgument", "design_id is required");
                }
                auto s = std::make_shared<Session>();
                s->design = &builtin_design(body["design_id"].get<std::string>());
                s->config = default_configuration(*s->design);
                if (body.contains("env_id")) {
                    scene(body["env_id"].get<std::string>());
                    s->env_id = body["env_id"].get<std::string>();
                }
                {
                    std::unique_lock lock(sessions_mutex);
                    s->id = new_id("s");
                    sessions[s->id] = s;
                }
                Json j = state(*s);
                j["design"] = design_summary_json(*s->design);
                send_json(res, j, 201);
            });
        });

        server.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            handle(res, [&] {
                auto s = session(req.matches[1]);
                std::lock_guard lock(s->mutex);
                send_json(res, state(*s));
            });
        });

        server.Patch(R"(/sessions/([^/]+)/params)", [this](const httplib::Request& req, httplib::Response& res) {
            handle(res, [&] {
                auto s = session(req.matches[1]);
                const Json body = parse_body(req);
                if (!body.contains("name") || !body["name"].is_string()) fail(422, "InvalidArgument", "name is required");
                const std::string name = body["name"];
                EditMode mode = EditMode::commit;
                if (body.contains("mode")) {
                    const std::string m = body["mode"].get<std::string>();
                    if (m == "preview") {
                        mode = EditMode::preview;
                    } else if (m != "commit") {
                        fail(422, "InvalidArgument", "mode must be preview or commit");
                    }
                }
                std::lock_guard lock(s->mutex);
                check_version(*s, body);
                EditResult result;
                if (body.contains("value")) {
                    result = set_parameter(*s->design, s->config, name, value_from_json(s->design->at(name), body["value"]), mode);
                } else if (body.contains("drag_point")) {
                    result = apply_handle_drag(*s->design, s->config, name, vec_from_json(body["drag_point"]), mode);
                } else if (body.contains("length")) {
                    if (!body["length"].is_number()) fail(422, "InvalidArgument", "length must be a number");
                    result = bind_measurement(*s->design, s->config, name, body["length"].get<double>());
                } else {
                    fail(422, "InvalidArgument", "one of value, drag_point or length is required");
                }
                if (result.status == EditStatus::preview) {
                    show(*s, s->config, result.config);
                } else {
                    show(*s, result.config, std::nullopt);
                }
                Json j = edit_result_to_json(result);
                j["mesh_version"] = s->mesh_version;
                send_json(res, j);
            });
        });

        server.Put(R"(/sessions/([^/]+)/pose)", [this](const httplib::Request& req, httplib::Response& res) {
            handle(res, [&] {
                auto s = session(req.matches[1]);
                const Json body = parse_body(req);
                const Vec3 position = vec_from_json(body.at("position"));
                if (!body.contains("yaw") || !body["yaw"].is_number()) fail(422, "InvalidArgument", "yaw is required");
                std::lock_guard lock(s->mutex);
                check_version(*s, body);
                show(*s, set_pose(s->config, position, body["yaw"].get<double>()), std::nullopt);
                send_json(res, state(*s));
            });
        });

        server.Put(R"(/sessions/([^/]+)/profiles)", [this](const httplib::Request& req, httplib::Response& res) {
            handle(res, [&] {
                auto s = session(req.matches[1]);
                const Json body = parse_body(req);
                const Json& list = body.is_array() ? body : body.at("profiles");
                std::vector<BodyProfile> profiles;
                for (const auto& p : list) profiles.push_back(profile_from_json(p));
                for (const auto& p : profiles) recommend(ErgonomicTag::seat_height, p);  // validates stature
                std::lock_guard lock(s->mutex);
                s->profiles = std::move(profiles);
                send_json(res, state(*s));
            });
        });

        server.Put(R"(/sessions/([^/]+)/environment)", [this](const httplib::Request& req, httplib::Response& res) {
            handle(res, [&] {
                auto s = session(req.matches[1]);
                const Json body = parse_body(req);
                const std::string env = body.at("env_id").get<std::string>();
                scene(env);
                std::lock_guard lock(s->mutex);
                s->env_id = env;
                send_json(res, state(*s));
            });
        });

        server.Post(R"(/sessions/([^/]+)/sketch)", [this](const httplib::Request& req, httplib::Response& res) {
            handle(res, [&] {
                auto s = session(req.matches[1]);
                const Json body = parse_body(req);
                const std::string name = body.at("param").get<std::string>();
                const Stroke stroke = stroke_from_json(body.at("stroke"));
                std::lock_guard lock(s->mutex);
                const auto* curve = std::get_if<CurveKind>(&s->design->at(name).kind);
                if (!curve) throw Error(ErrorCode::KindMismatch, "parameter '" + name + "' is not a curve");
                const double tol = body.contains("tol") ? body["tol"].get<double>() : 0.0;
                const FitResult fit = fit_stroke(stroke, curve->segment_budget, tol);
                const CurveApplication applied = apply_curve(*s->design, s->config, name, fit);
                show(*s, applied.edit.config, std::nullopt);
                Json j{{"fit", fit_to_json(fit)},
                       {"applied", path_to_json(applied.applied)},
                       {"modified_by_constraints", applied.modified_by_constraints},
                       {"edit", edit_result_to_json(applied.edit)},
                       {"config", config_to_json(s->config)},
                       {"mesh_version", s->mesh_version}};
                send_json(res, j);
            });
        });

        server.Post("/environment", [this](const httplib::Request& req, httplib::Response& res) {
            handle(res, [&] {
                SceneFormat format = SceneFormat::obj;
                if (req.has_param("format")) {
                    format = format_from_path("scan." + req.get_param_value("format"));
                } else if (req.body.rfind("ply", 0) == 0) {
                    format = SceneFormat::ply;
                }
                LoadOptions load;
                load.z_up = req.has_param("z_up") && req.get_param_value("z_up") != "0";
                auto scene = std::make_shared<const EnvironmentScene>(load_scene(req.body, format, load));
                std::string id;
                {
                    std::unique_lock lock(sessions_mutex);
                    id = new_id("e");
                    scenes[id] = scene;
                }
                Json j = scene_summary_json(*scene);
                j["scene_id"] = id;
                send_json(res, j, 201);
            });
        });

        server.Post(R"(/sessions/([^/]+)/estimate/stability)", [this](const httplib::Request& req, httplib::Response& res) {
            handle(res, [&] {
                auto s = session(req.matches[1]);
                const Json body = parse_body(req);
                StabilityOptions opts;
                if (body.contains("release_tilt_deg")) opts.release_tilt_deg = body["release_tilt_deg"].get<double>();
                if (body.contains("release_tilt_axis")) opts.release_tilt_axis = vec_from_json(body["release_tilt_axis"]);
                Configuration config;
                std::shared_ptr<const EnvironmentScene> env;
                {
                    std::lock_guard lock(s->mutex);
                    config = s->config;
                    env = session_scene(*s);
                }
                bool expected = false;
                if (!s->simulating.compare_exchange_strong(expected, true)) {
                    fail(409, "Conflict", "a stability simulation is already running for this session");
                }
                struct Release {
                    std::atomic<bool>& flag;
                    ~Release() { flag = false; }
                } release{s->simulating};
                const TriangleMesh mesh = generate_mesh(*s->design, config);
                send_json(res, stability_to_json(estimate_stability(mesh, *env, opts)));
            });
        });

        server.Post(R"(/sessions/([^/]+)/estimate/lighting)", [this](const httplib::Request& req, httplib::Response& res) {
            handle(res, [&] {
                auto s = session(req.matches[1]);
                const Json body = parse_body(req);
                const Json& lj = body.at("light");
                PointLight light;
                light.position = vec_from_json(lj.at("position"));
                if (lj.contains("intensity")) light.intensity = lj["intensity"].get<double>();
                LightingOptions opts;
                if (body.contains("raster_extent")) opts.raster_extent = body["raster_extent"].get<double>();
                if (body.contains("raster_center")) {
                    const auto& c = body["raster_center"];
                    opts.raster_center = Vec2(c.at(0).get<double>(), c.at(1).get<double>());
                }
                const bool samples = body.value("include_samples", false);
                Configuration config;
                std::shared_ptr<const EnvironmentScene> env;
                {
                    std::lock_guard lock(s->mutex);
                    config = s->config;
                    if (!s->env_id) fail(422, "EmptyScene", "session has no environment");
                    env = scene(*s->env_id);
                }
                const TriangleMesh mesh = generate_mesh(*s->design, config);
                send_json(res, lighting_to_json(estimate_lighting(mesh, *env, light, opts), samples));
            });
        });

        server.Post(R"(/sessions/([^/]+)/check)", [this](const httplib::Request& req, httplib::Response& res) {
            handle(res, [&] {
                auto s = session(req.matches[1]);
                const RequirementSpec spec = requirement_spec_from_json(parse_body(req));
                Configuration config;
                std::shared_ptr<const EnvironmentScene> env;
                {
                    std::lock_guard lock(s->mutex);
                    config = s->config;
                    if (s->env_id) env = scene(*s->env_id);
                }
                const TriangleMesh mesh = generate_mesh(*s->design, config);
                send_json(res, requirement_result_to_json(check_requirements(*s->design, config, mesh, env.get(), spec)));
            });
        });

        server.Get(R"(/sessions/([^/]+)/mesh)", [this](const httplib::Request& req, httplib::Response& res) {
            handle(res, [&] {
                auto s = session(req.matches[1]);
                Configuration shown;
                std::uint64_t version;
                {
                    std::lock_guard lock(s->mutex);
                    shown = s->displayed();
                    version = s->mesh_version;
                }
                if (req.has_param("version") && req.get_param_value("version") == std::to_string(version)) {
                    res.status = 304;
                    return;
                }
                Json j = mesh_to_json(generate_mesh(*s->design, shown));
                j["version"] = version;
                send_json(res, j);
            });
        });

        server.Get(R"(/sessions/([^/]+)/export\.stl)", [this](const httplib::Request& req, httplib::Response& res) {
            handle(res, [&] {
                auto s = session(req.matches[1]);
                Configuration config;
                {
                    std::lock_guard lock(s->mutex);
                    config = s->config;
                }
                res.set_content(export_stl(generate_mesh(*s->design, config)), "model/stl");
                res.set_header("Content-Disposition", "attachment; filename=\"" + s->design->id + ".stl\"");
            });
        });

        server.Post("/snapshot", [this](const httplib::Request&, httplib::Response& res) {
            handle(res, [&] {
                if (!options.snapshot_path) fail(422, "InvalidArgument", "no snapshot path configured");
                const Json j = snapshot();
                std::ofstream out(*options.snapshot_path, std::ios::binary | std::ios::trunc);
                if (!(out << j.dump(2))) throw Error(ErrorCode::IoError, "cannot write " + *options.snapshot_path);
                send_json(res, {{"path", *options.snapshot_path}, {"sessions", j["sessions"].size()}});
            });
        });
    }

    Json snapshot() {
        Json list = Json::array();
        std::shared_lock lock(sessions_mutex);
        for (const auto& [id, s] : sessions) {
            std::lock_guard guard(s->mutex);
            Json profiles = Json::array();
            for (const auto& p : s->profiles) profiles.push_back(profile_to_json(p));
            list.push_back({{"id", id},
                            {"config", config_to_json(s->config)},
                            {"mesh_version", s->mesh_version},
                            {"profiles", std::move(profiles)}});
        }
        return {{"version", 1}, {"sessions", std::move(list)}};
    }

    void load_snapshot() {
        std::ifstream in(*options.snapshot_path, std::ios::binary);
        if (!in) return;
        const Json j = Json::parse(in, nullptr, false);
        if (j.is_discarded() || !j.contains("sessions")) {
            throw Error(ErrorCode::ParseError, "malformed snapshot " + *options.snapshot_path);
        }
        for (const auto& sj : j["sessions"]) {
            auto s = std::make_shared<Session>();
            s->id = sj.at("id").get<std::string>();
            const Json& cj = sj.at("config");
            s->design = &builtin_design(cj.at("design_id").get<std::string>());
            s->config = config_from_json(*s->design, cj);
            s->mesh_version = sj.value("mesh_version", std::uint64_t{1});
            for (const auto& p : sj.value("profiles", Json::array())) s->profiles.push_back(profile_from_json(p));
            sessions[s->id] = s;
        }
    }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Service::~Service() { stop(); }

int Service::start() {
    auto& im = *impl_;
    im.bound_port = im.options.port == 0 ? im.server.bind_to_any_port(im.options.bind)
                                         : (im.server.bind_to_port(im.options.bind, im.options.port) ? im.options.port : -1);
    if (im.bound_port < 0) {
        throw Error(ErrorCode::IoError, "cannot bind " + im.options.bind + ":" + std::to_string(im.options.port));
    }
    im.thread = std::thread([&im] { im.server.listen_after_bind(); });
    im.server.wait_until_ready();
    return im.bound_port;
}

void Service::run() {
    auto& im = *impl_;
    im.bound_port = im.options.port;
    if (!im.server.listen(im.options.bind, im.options.port)) {
        throw Error(ErrorCode::IoError, "cannot serve on " + im.options.bind + ":" + std::to_string(im.options.port));
    }
}

void Service::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

int Service::port() const { return impl_->bound_port; }

}  // namespace insitu
