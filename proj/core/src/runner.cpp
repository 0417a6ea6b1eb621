#include "wnlab/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include "wnlab/conditions.hpp"
#include "wnlab/forcing.hpp"
#include "wnlab/ode.hpp"

namespace wnlab {

namespace fs = std::filesystem;

namespace {

constexpr const char* kMeasured = "measured";
constexpr const char* kFitted = "fitted";
constexpr const char* kCertificate = "certificate";
constexpr const char* kConfig = "config";

json tag(json value, const char* provenance) {
    json j;
    j["value"] = std::move(value);
    j["provenance"] = provenance;
    return j;
}

// Keyed accessors that report the JSON pointer of the failing value.
class Reader {
public:
    Reader(const json& obj, std::string pointer, std::set<std::string> allowed)
        : obj_(obj), pointer_(std::move(pointer)) {
        if (!obj_.is_object()) throw ConfigError(pointer_.empty() ? "/" : pointer_, "expected an object");
        for (const auto& [k, v] : obj_.items())
            if (!allowed.count(k)) throw ConfigError(at(k), "unknown key");
    }

    std::string at(const std::string& key) const { return pointer_ + "/" + key; }
    bool has(const char* key) const { return obj_.contains(key); }
    const json& raw(const char* key) const { return obj_.at(key); }

    double number(const char* key, double fallback, double lo, double hi, bool lo_open = false) const {
        if (!has(key)) return fallback;
        const json& v = obj_.at(key);
        if (!v.is_number()) throw ConfigError(at(key), "expected a number");
        const double x = v.get<double>();
        const bool low_ok = lo_open ? x > lo : x >= lo;
        if (!std::isfinite(x) || !low_ok || x > hi) {
            std::ostringstream os;
            os << "must lie in " << (lo_open ? "(" : "[") << lo << ", " << hi << "]";
            throw ConfigError(at(key), os.str());
        }
        return x;
    }
    std::uint64_t integer(const char* key, std::uint64_t fallback, std::uint64_t lo, std::uint64_t hi) const {
        if (!has(key)) return fallback;
        const json& v = obj_.at(key);
        if (!v.is_number_unsigned()) throw ConfigError(at(key), "expected a non-negative integer");
        const auto x = v.get<std::uint64_t>();
        if (x < lo || x > hi)
            throw ConfigError(at(key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return x;
    }
    bool boolean(const char* key, bool fallback) const {
        if (!has(key)) return fallback;
        if (!obj_.at(key).is_boolean()) throw ConfigError(at(key), "expected true or false");
        return obj_.at(key).get<bool>();
    }
    std::string string(const char* key, std::string fallback) const {
        if (!has(key)) return fallback;
        if (!obj_.at(key).is_string()) throw ConfigError(at(key), "expected a string");
        return obj_.at(key).get<std::string>();
    }
    std::vector<double> numbers(const char* key, const std::string& p) const {
        const json& v = obj_.at(key);
        if (!v.is_array()) throw ConfigError(p, "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number() || !std::isfinite(v[i].get<double>()))
                throw ConfigError(p + "/" + std::to_string(i), "expected a finite number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

private:
    const json& obj_;
    std::string pointer_;
};

Action action_from_string(const std::string& s, const std::string& pointer) {
    for (Action a : {Action::asymptotic, Action::classify, Action::condition1, Action::wave, Action::trace,
                     Action::full_pipeline})
        if (to_string(a) == s) return a;
    throw ConfigError(pointer, "unknown action '" + s + "'");
}

WaveSystemSpec parse_system(const json& j, std::string& name) {
    const std::string p = "/system";
    try {
        if (j.is_string()) {
            name = j.get<std::string>();
            return catalogue(name);
        }
        if (j.is_array()) {
            if (j.empty() || !j[0].is_string()) throw ConfigError(p + "/0", "expected a catalogue name");
            name = j[0].get<std::string>();
            std::vector<double> params;
            for (std::size_t i = 1; i < j.size(); ++i) {
                if (!j[i].is_number()) throw ConfigError(p + "/" + std::to_string(i), "expected a number");
                params.push_back(j[i].get<double>());
            }
            WaveSystemSpec spec = catalogue(name, params);
            name = spec.label();
            return spec;
        }
        if (j.is_object()) {
            WaveSystemSpec spec = wave_system_from_json(j, p);
            name = spec.label();
            return spec;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(p, e.what());
    }
    throw ConfigError(p, "expected a catalogue name, [name, params...] or an inline system object");
}

WaveScenario parse_wave(const json& j) {
    const std::string p = "/wave";
    Reader r(j, p,
             {"h", "u_range", "v_range", "amplitude", "width", "bumps", "u_fixed", "s_start", "min_window", "refine", "export_grid",
              "blowup_threshold", "max_deviation", "max_h_oscillation"});
    WaveScenario w;
    w.h = r.number("h", w.h, 0.0, 10.0, true);
    if (r.has("u_range")) {
        auto v = r.numbers("u_range", r.at("u_range"));
        if (v.size() != 2 || !(v[1] > v[0])) throw ConfigError(r.at("u_range"), "expected [u0, u1] with u1 > u0");
        w.u0 = v[0], w.u1 = v[1];
    }
    if (r.has("v_range")) {
        auto v = r.numbers("v_range", r.at("v_range"));
        if (v.size() != 2 || !(v[1] > v[0])) throw ConfigError(r.at("v_range"), "expected [v0, v1] with v1 > v0");
        w.v0 = v[0], w.v1 = v[1];
    }
    if (!(w.v0 > w.u1)) throw ConfigError(p, "v0 must exceed u1 so that r stays positive");
    w.amplitude = r.number("amplitude", w.amplitude, -1e3, 1e3);
    w.width = r.number("width", w.width, 0.0, 1e3, true);
    if (r.has("bumps")) {
        const json& b = r.raw("bumps");
        if (!b.is_array()) throw ConfigError(r.at("bumps"), "expected an array of bump objects");
        for (std::size_t i = 0; i < b.size(); ++i) {
            Reader br(b[i], r.at("bumps") + "/" + std::to_string(i), {"amplitude", "center", "width"});
            BumpProfile bp;
            bp.amplitude = br.number("amplitude", 0.0, -1e3, 1e3);
            bp.center = br.number("center", 0.5 * (w.u0 + w.u1), -1e6, 1e6);
            bp.width = br.number("width", w.width, 0.0, 1e3, true);
            w.bumps.push_back(bp);
        }
    }
    if (r.has("u_fixed")) {
        w.u_fixed = r.numbers("u_fixed", r.at("u_fixed"));
        for (std::size_t i = 0; i < w.u_fixed.size(); ++i)
            if (w.u_fixed[i] < w.u0 || w.u_fixed[i] > w.u1)
                throw ConfigError(r.at("u_fixed") + "/" + std::to_string(i), "outside the u range");
    }
    w.s_start = r.number("s_start", w.s_start, -50.0, 50.0);
    w.min_window = r.number("min_window", w.min_window, 0.0, 100.0);
    w.refine = r.boolean("refine", w.refine);
    w.export_grid = r.boolean("export_grid", w.export_grid);
    w.blowup_threshold = r.number("blowup_threshold", w.blowup_threshold, 0.0, 1e300, true);
    w.max_deviation = r.number("max_deviation", w.max_deviation, 0.0, 1e6, true);
    w.max_h_oscillation = r.number("max_h_oscillation", w.max_h_oscillation, 0.0, 1e6, true);
    return w;
}

std::string timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string number_label(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

json effective_config(const ScenarioConfig& c, std::uint64_t seed, std::size_t trials) {
    json j;
    j["system"] = c.system_name;
    j["action"] = to_string(c.action);
    j["eps"] = c.eps;
    j["delta"] = c.delta;
    j["C"] = c.amplitude;
    j["trials"] = trials;
    j["seed"] = seed;
    j["s_max"] = c.s_max;
    j["tol"] = c.tol;
    j["forcing"] = to_string(c.forcing);
    if (c.phi0) j["phi0"] = *c.phi0;
    if (c.action == Action::wave || c.action == Action::trace || c.action == Action::full_pipeline) {
        const auto& w = c.wave;
        json wj;
        wj["h"] = w.h;
        wj["u_range"] = {w.u0, w.u1};
        wj["v_range"] = {w.v0, w.v1};
        json bumps = json::array();
        for (const auto& b : w.resolved_bumps(c.system->n_fields()))
            bumps.push_back({{"amplitude", b.amplitude}, {"center", b.center}, {"width", b.width}});
        wj["bumps"] = std::move(bumps);
        wj["u_fixed"] = w.u_fixed;
        wj["s_start"] = w.s_start;
        wj["min_window"] = w.min_window;
        wj["refine"] = w.refine;
        wj["export_grid"] = w.export_grid;
        wj["blowup_threshold"] = w.blowup_threshold;
        wj["max_deviation"] = w.max_deviation;
        wj["max_h_oscillation"] = w.max_h_oscillation;
        j["wave"] = std::move(wj);
    }
    return j;
}

json trials_table(const std::vector<TrialSummary>& trials) {
    json rows = json::array();
    for (const auto& t : trials) {
        json r;
        r["id"] = t.id;
        r["forcing"] = t.forcing;
        r["phi0"] = t.phi0;
        r["status"] = to_string(t.status);
        r["status_s"] = t.status_s;
        r["sup_norm"] = t.sup_norm;
        if (t.h_norm0) r["h_norm0"] = *t.h_norm0;
        if (t.h_norm_sup) r["h_norm_sup"] = *t.h_norm_sup;
        if (t.h_norm_final) r["h_norm_final"] = *t.h_norm_final;
        if (t.within_certificate) r["within_certificate"] = *t.within_certificate;
        rows.push_back(std::move(r));
    }
    return tag(std::move(rows), kMeasured);
}

void write_trials_csv(const fs::path& path, const std::vector<TrialSummary>& trials) {
    std::ofstream os(path);
    os << "id,forcing,status,status_s,sup_norm,h_norm0,h_norm_sup,within_certificate\n";
    os.precision(17);
    for (const auto& t : trials) {
        os << t.id << ',' << t.forcing << ',' << to_string(t.status) << ',' << t.status_s << ',' << t.sup_norm << ',';
        if (t.h_norm0) os << *t.h_norm0;
        os << ',';
        if (t.h_norm_sup) os << *t.h_norm_sup;
        os << ',';
        if (t.within_certificate) os << (*t.within_certificate ? "true" : "false");
        os << '\n';
    }
}

json certificate_json(const Certificate& c) {
    json j;
    j["certified"] = c.certified;
    if (!c.reason.empty()) j["reason"] = c.reason;
    if (c.certified) {
        j["increment"] = tag(c.increment, kCertificate);
        j["c_tilde_bound"] = tag(c.c_tilde_bound, kCertificate);
        j["lambda_min"] = tag(c.lambda_min, kCertificate);
        j["lambda_max"] = tag(c.lambda_max, kCertificate);
    }
    return j;
}

json verdict_value(const ClassificationReport& rep) {
    switch (rep.verdict) {
        case Verdict::blowup:
        case Verdict::linear_growth:
        case Verdict::exponential_growth:
        case Verdict::super_exponential:
            return tag(rep.value, kFitted);
        default:
            return tag(rep.value, kMeasured);
    }
}

class Session {
public:
    Session(const ScenarioConfig& c, const RunOverrides& o)
        : cfg_(c),
          spec_(*c.system),
          sys_(asymptotic_system(spec_)),
          seed_(o.seed.value_or(c.seed)),
          threads_(std::max(1u, o.threads)),
          dir_(o.output_dir.value_or(c.output_dir)) {
        trials_ = c.trials.value_or(c.action == Action::classify ? 8 : 200);
        fs::create_directories(dir_);
    }

    RunResult execute(const std::string& timestamp) {
        json report;
        report["schema_version"] = "1";
        report["timestamp"] = timestamp;
        report["action"] = to_string(cfg_.action);
        json sys;
        sys["label"] = spec_.label();
        sys["definition"] = tag(to_json(spec_), kConfig);
        sys["classical_null_condition"] = classical_null_condition(spec_);
        report["system"] = std::move(sys);
        report["config"] = tag(effective_config(cfg_, seed_, trials_), kConfig);

        json results;
        bool pass = true;
        switch (cfg_.action) {
            case Action::asymptotic: results = asymptotic(); break;
            case Action::classify: results = classify(pass); break;
            case Action::condition1: results = condition1(pass); break;
            case Action::wave: results = wave(); break;
            case Action::trace: results = trace(pass, false); break;
            case Action::full_pipeline: results = full_pipeline(pass); break;
        }
        report["results"] = std::move(results);
        report["pass"] = pass;
        report["artifacts"] = artifacts_;
        artifacts_.push_back("report.json");

        std::ofstream os(dir_ / "report.json");
        os << report.dump(2) << '\n';
        if (!os) throw std::runtime_error("cannot write " + (dir_ / "report.json").string());

        RunResult out;
        out.exit_code = pass ? 0 : 2;
        out.report = std::move(report);
        out.artifacts = artifacts_;
        return out;
    }

private:
    std::ofstream open(const std::string& name) {
        std::ofstream os(dir_ / name);
        if (!os) throw std::runtime_error("cannot write " + (dir_ / name).string());
        artifacts_.push_back(name);
        return os;
    }

    IntegrateOptions integrate_options() const {
        IntegrateOptions io;
        io.tol = cfg_.tol;
        return io;
    }

    json asymptotic() {
        const std::size_t n = spec_.n_fields();
        const Vector phi0 = cfg_.phi0.value_or(Vector(n, cfg_.eps));
        if (phi0.size() != n) throw ConfigError("/phi0", "length differs from the number of fields");
        std::optional<Matrix> form;
        if (spec_.structure()) form = spec_.structure()->hamiltonian.form();
        const Forcing forcing = cfg_.forcing == ForcingKind::zero
                                    ? Forcing{}
                                    : make_forcing(cfg_.forcing, n, cfg_.amplitude, cfg_.eps, cfg_.delta, seed_, form);
        const Trajectory traj = integrate(sys_, phi0, cfg_.s_max, forcing, integrate_options());
        {
            auto os = open("trajectory.csv");
            write_trajectory_csv(os, traj);
        }
        json r;
        r["status"] = to_string(traj.status());
        r["status_s"] = tag(traj.status_s(), traj.status() == TrajectoryStatus::blowup ? kFitted : kMeasured);
        r["samples"] = tag(traj.size(), kMeasured);
        r["accepted_steps"] = tag(traj.stats().accepted, kMeasured);
        r["rejected_steps"] = tag(traj.stats().rejected, kMeasured);
        r["sup_norm"] = tag(traj.stats().max_norm, kMeasured);
        r["final_phi"] = tag(Vector(traj.back().begin(), traj.back().end()), kMeasured);
        if (const auto& st = spec_.structure()) {
            const auto& form = st->hamiltonian.form();
            const double h0 = form.bilinear(phi0, phi0);
            double drift = 0.0;
            for (std::size_t i = 0; i < traj.size(); ++i)
                drift = std::max(drift, std::abs(form.bilinear(traj.phi(i), traj.phi(i)) - h0));
            r["hamiltonian_initial"] = tag(h0, kMeasured);
            r["hamiltonian_max_relative_drift"] = tag(h0 > 0.0 ? drift / h0 : drift, kMeasured);
        }
        return r;
    }

    json classify(bool& pass) {
        json r;
        if (classical_null_condition(spec_)) {
            r["verdict"] = to_string(Verdict::classical_null);
            r["note"] = "all (d_t phi)(d_t phi) coefficients vanish";
            return r;
        }
        GrowthOptions go;
        go.trials = trials_;
        go.seed = seed_;
        go.integrate = integrate_options();
        go.threads = threads_;
        const auto rep = classify_growth(sys_, cfg_.eps, cfg_.s_max, go);
        pass = rep.pass;
        r["verdict"] = to_string(rep.verdict);
        r["value"] = verdict_value(rep);
        r["note"] = rep.note;
        r["c_tilde_empirical"] = tag(rep.c_tilde_empirical, kMeasured);
        r["worst_trial"] = tag(rep.worst_trial, kMeasured);
        json fits = json::array();
        for (const auto& f : rep.fits)
            fits.push_back({{"model", f.model},
                            {"admissible", f.admissible},
                            {"rate", f.rate},
                            {"intercept", f.intercept},
                            {"sse", f.sse},
                            {"r_squared", f.r_squared}});
        r["fits"] = tag(std::move(fits), kFitted);
        r["trials"] = trials_table(rep.trials);
        r["warnings"] = rep.warnings;
        write_trials_csv(dir_ / "trials.csv", rep.trials);
        artifacts_.push_back("trials.csv");
        return r;
    }

    json condition1(bool& pass) {
        Condition1Params p;
        p.epsilon = cfg_.eps;
        p.decay = cfg_.delta;
        p.amplitude = cfg_.amplitude;
        p.trials = trials_;
        p.s_max = cfg_.s_max;
        p.seed = seed_;
        p.integrate = integrate_options();
        p.threads = threads_;
        const auto rep = check_condition_1(sys_, p);
        pass = rep.pass;
        json r;
        r["verdict"] = to_string(rep.verdict);
        r["value"] = verdict_value(rep);
        r["pass"] = rep.pass;
        r["note"] = rep.note;
        r["c_tilde_empirical"] = tag(rep.c_tilde_empirical, kMeasured);
        if (rep.certificate) {
            r["certificate"] = certificate_json(*rep.certificate);
            std::size_t violations = 0;
            for (const auto& t : rep.trials)
                if (t.within_certificate && !*t.within_certificate) ++violations;
            r["certificate_violations"] = tag(violations, kMeasured);
        }
        r["runs"] = tag(rep.trials.size(), kMeasured);
        r["trials"] = trials_table(rep.trials);
        r["warnings"] = rep.warnings;
        write_trials_csv(dir_ / "trials.csv", rep.trials);
        artifacts_.push_back("trials.csv");
        return r;
    }

    CharacteristicData wave_data(const WaveScenario& w) const {
        return bump_data(w.u0, w.u1, w.v0, w.v1, w.resolved_bumps(spec_.n_fields()));
    }

    json grid_summary(const CharacteristicGrid& g) const {
        json r;
        r["status"] = to_string(g.status());
        r["h"] = tag(g.h(), kConfig);
        r["rows"] = tag(g.rows(), kConfig);
        r["cols"] = tag(g.cols(), kConfig);
        if (g.status() == GridStatus::blowup) {
            r["blowup_u"] = tag(g.blowup_u(), kMeasured);
            r["blowup_v"] = tag(g.blowup_v(), kMeasured);
        }
        r["cells"] = tag(g.stats().cells, kMeasured);
        r["max_phi"] = tag(g.stats().max_phi, kMeasured);
        r["max_psi_u"] = tag(g.stats().max_psi_u, kMeasured);
        r["max_psi_v"] = tag(g.stats().max_psi_v, kMeasured);
        return r;
    }

    EvolveOptions evolve_options(const WaveScenario& w, bool keep_all) const {
        EvolveOptions eo;
        eo.blowup_threshold = w.blowup_threshold;
        if (!keep_all) eo.keep_u = w.u_fixed.empty() ? std::vector<double>{w.u0} : w.u_fixed;
        return eo;
    }

    json wave() {
        const auto& w = cfg_.wave;
        const auto grid = evolve(spec_, wave_data(w), w.h, evolve_options(w, w.export_grid));
        json r = grid_summary(grid);
        if (w.export_grid) {
            {
                auto os = open("grid.csv");
                write_grid_csv(os, grid);
            }
            auto os = open("grid.json");
            os << tag(grid_metadata(grid), kConfig).dump(2) << '\n';
        }
        return r;
    }

    // One trace comparison at spacing h; returns the per-u results.
    json trace_at(const WaveScenario& w, double h, bool write, std::vector<double>* deviations,
                  std::vector<double>* oscillations, json& grid_out) {
        WaveScenario wh = w;
        wh.h = h;
        const auto grid = evolve(spec_, wave_data(wh), h, evolve_options(wh, false));
        grid_out = grid_summary(grid);
        json per_u = json::array();
        for (double u : w.u_fixed) {
            json e;
            e["u_fixed"] = tag(u, kConfig);
            RadiationTrace tr;
            try {
                tr = radiation_trace(grid, u);
            } catch (const std::invalid_argument& ex) {
                e["skipped"] = ex.what();
                per_u.push_back(std::move(e));
                deviations->push_back(std::numeric_limits<double>::quiet_NaN());
                oscillations->push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            if (write) {
                const std::string name = "trace_u" + number_label(u) + ".csv";
                auto os = open(name);
                write_trace_csv(os, tr);
                e["file"] = name;
            }
            e["s_range"] = tag(json::array({tr.s.front(), tr.s.back()}), kMeasured);
            double dev = std::numeric_limits<double>::quiet_NaN();
            try {
                CompareOptions co;
                co.epsilon = cfg_.eps;
                co.min_window = w.min_window;
                co.integrate = integrate_options();
                const auto cmp = compare_to_asymptotic(tr, sys_, w.s_start, co);
                dev = cmp.sup_deviation;
                json c;
                c["s_start"] = tag(cmp.s_start, kMeasured);
                c["s_end"] = tag(cmp.s_end, kMeasured);
                c["sup_deviation"] = tag(cmp.sup_deviation, kMeasured);
                c["s_at_sup"] = tag(cmp.s_at_sup, kMeasured);
                c["scale"] = tag(cmp.scale, kMeasured);
                const double cut = cmp.s_end - std::log(10.0);
                double res_tail = 0.0;
                for (std::size_t k = 0; k < cmp.s.size(); ++k)
                    if (cmp.s[k] >= cut) res_tail = std::max(res_tail, cmp.residual[k]);
                c["residual_sup_final_decade"] = tag(res_tail, kMeasured);
                e["comparison"] = std::move(c);
            } catch (const std::invalid_argument& ex) {
                e["comparison"] = {{"skipped", ex.what()}};
            }
            deviations->push_back(dev);
            double osc = std::numeric_limits<double>::quiet_NaN();
            if (const auto& st = spec_.structure()) {
                const auto hd = hamiltonian_drift(tr, st->hamiltonian);
                osc = hd.relative_oscillation;
                json d;
                d["tail_window"] = tag(hd.tail_window, kConfig);
                d["tail_mean"] = tag(hd.tail_mean, kMeasured);
                d["tail_oscillation"] = tag(hd.tail_oscillation, kMeasured);
                d["relative_oscillation"] = tag(hd.relative_oscillation, kMeasured);
                d["decay_rate"] = tag(hd.decay_rate, kFitted);
                e["hamiltonian"] = std::move(d);
            }
            oscillations->push_back(osc);
            per_u.push_back(std::move(e));
        }
        return per_u;
    }

    json trace(bool& pass, bool gate) {
        const auto& w = cfg_.wave;
        std::vector<double> dev, osc, dev2, osc2;
        json r;
        json grid;
        r["traces"] = trace_at(w, w.h, true, &dev, &osc, grid);
        r["grid"] = std::move(grid);
        bool ok = true;
        for (std::size_t k = 0; k < dev.size(); ++k) {
            if (!(dev[k] <= w.max_deviation)) ok = false;
            if (spec_.structure() && !(osc[k] <= w.max_h_oscillation)) ok = false;
        }
        const bool on_coarse_grid = std::all_of(w.u_fixed.begin(), w.u_fixed.end(), [&](double u) {
            const double q = (u - w.u0) / (2.0 * w.h);
            return std::abs(q - std::round(q)) < 1e-9;
        });
        if (w.refine && on_coarse_grid) {
            json grid2;
            const json coarse = trace_at(w, 2.0 * w.h, false, &dev2, &osc2, grid2);
            json ref = json::array();
            for (std::size_t k = 0; k < dev.size(); ++k) {
                json e;
                e["u_fixed"] = tag(w.u_fixed[k], kConfig);
                e["deviation_2h"] = tag(dev2[k], kMeasured);
                e["deviation_h"] = tag(dev[k], kMeasured);
                e["deviation_ratio"] = tag(dev2[k] / dev[k], kMeasured);
                const bool halves = dev[k] <= 0.5 * dev2[k];
                e["deviation_halves"] = halves;
                if (!halves) ok = false;
                if (spec_.structure()) {
                    e["oscillation_2h"] = tag(osc2[k], kMeasured);
                    e["oscillation_h"] = tag(osc[k], kMeasured);
                    const bool decreases = osc[k] < osc2[k];
                    e["oscillation_decreases"] = decreases;
                    if (!decreases) ok = false;
                }
                ref.push_back(std::move(e));
            }
            r["refinement"] = std::move(ref);
            r["grid_2h"] = std::move(grid2);
        } else if (w.refine) {
            r["refinement"] = {{"skipped", "u_fixed not on the 2h grid"}};
        }
        r["within_tolerances"] = ok;
        if (gate) pass = pass && ok;
        return r;
    }

    json full_pipeline(bool& pass) {
        json r;
        if (const auto& st = spec_.structure()) {
            const auto cert = certify_hamiltonian(st->algebra, st->hamiltonian, cfg_.eps, cfg_.delta, cfg_.amplitude);
            r["certificate"] = certificate_json(cert);
            if (!cert.certified) pass = false;
        }
        bool c1 = true;
        r["condition1"] = condition1(c1);
        if (!c1) pass = false;
        r["trace"] = trace(pass, true);
        r["wave_completed"] = r["trace"]["grid"]["status"] == to_string(GridStatus::completed);
        if (!r["wave_completed"].get<bool>()) pass = false;
        return r;
    }

    const ScenarioConfig& cfg_;
    const WaveSystemSpec& spec_;
    AsymptoticSystem sys_;
    std::uint64_t seed_;
    unsigned threads_;
    fs::path dir_;
    std::size_t trials_ = 0;
    std::vector<std::string> artifacts_;
};

}  // namespace

std::string to_string(Action a) {
    switch (a) {
        case Action::asymptotic: return "asymptotic";
        case Action::classify: return "classify";
        case Action::condition1: return "condition1";
        case Action::wave: return "wave";
        case Action::trace: return "trace";
        case Action::full_pipeline: return "full_pipeline";
    }
    return "?";
}

std::vector<BumpProfile> WaveScenario::resolved_bumps(std::size_t n_fields) const {
    if (!bumps.empty()) {
        if (bumps.size() != n_fields)
            throw ConfigError("/wave/bumps", "expected one bump per field (" + std::to_string(n_fields) + ")");
        return bumps;
    }
    std::vector<BumpProfile> out;
    const double mid = 0.5 * (u0 + u1);
    for (std::size_t a = 0; a < n_fields; ++a) {
        const double offset = (static_cast<double>(a) - 0.5 * static_cast<double>(n_fields - 1)) * 0.5 * width;
        const double sign = (a % 3 == 2) ? -1.0 : 1.0;
        out.push_back(BumpProfile{sign * amplitude, mid + offset, width});
    }
    return out;
}

ScenarioConfig parse_config(const json& doc) {
    Reader r(doc, "",
             {"system", "action", "eps", "delta", "C", "trials", "seed", "s_max", "tol", "phi0", "forcing", "wave",
              "output_dir"});
    ScenarioConfig c;
    c.raw = doc;
    if (!r.has("system")) throw ConfigError("/system", "missing");
    c.system = parse_system(r.raw("system"), c.system_name);
    if (!r.has("action")) throw ConfigError("/action", "missing");
    c.action = action_from_string(r.string("action", ""), "/action");
    c.eps = r.number("eps", c.eps, 0.0, 10.0, true);
    c.delta = r.number("delta", c.delta, 0.0, 100.0, true);
    c.amplitude = r.number("C", c.amplitude, 0.0, 1e6);
    if (r.has("trials")) c.trials = static_cast<std::size_t>(r.integer("trials", 0, 1, 1'000'000));
    c.seed = r.integer("seed", 0, 0, std::numeric_limits<std::uint64_t>::max());
    c.s_max = r.number("s_max", c.s_max, 0.0, 1e7, true);
    c.tol = r.number("tol", c.tol, 1e-14, 1e-3, true);
    if (r.has("phi0")) {
        c.phi0 = r.numbers("phi0", "/phi0");
        if (c.phi0->size() != c.system->n_fields()) throw ConfigError("/phi0", "length differs from the number of fields");
    }
    if (r.has("forcing")) {
        try {
            c.forcing = forcing_kind_from_string(r.string("forcing", "zero"));
        } catch (const std::exception& e) {
            throw ConfigError("/forcing", e.what());
        }
    }
    if (r.has("wave")) c.wave = parse_wave(r.raw("wave"));
    c.wave.resolved_bumps(c.system->n_fields());
    c.output_dir = r.string("output_dir", c.output_dir);
    return c;
}

ScenarioConfig load_config(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

RunResult run(const ScenarioConfig& config, const RunOverrides& overrides) {
    if (!config.system) throw std::invalid_argument("run: configuration has no system");
    Session session(config, overrides);
    return session.execute(overrides.timestamp.empty() ? timestamp_now() : overrides.timestamp);
}

std::string list_catalogue() {
    std::ostringstream os;
    for (const auto& e : catalogue_entries()) {
        std::string name = e.name;
        if (e.name == "rigid_body") name += "(I1,I2,I3)";
        std::vector<double> params(e.n_params, 1.0);
        if (e.name == "rigid_body") params = {1.0, 2.0, 3.0};
        const WaveSystemSpec spec = catalogue(e.name, params);
        std::size_t nf = 0, ng = 0;
        for (double x : spec.bad_coeffs().raw()) nf += x != 0.0;
        for (double x : spec.nullform_coeffs().raw()) ng += x != 0.0;
        os << name << " - " << e.equation << " - " << e.behaviour << "  [N=" << e.n_fields << ", F: " << nf
           << " nonzero, G: " << ng << " nonzero]\n";
    }
    return os.str();
}

}  // namespace wnlab
