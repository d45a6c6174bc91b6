#include "ncihf/state_io.hpp"

#include "json.hpp"
#include "ncihf/errors.hpp"

namespace ncihf {

using nlohmann::json;

namespace {

json cj(cplx z) { return json::array({z.real(), z.imag()}); }

cplx jc(const json& j, const char* what) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2) throw ConfigError(std::string(what) + ": expected [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

json vj(const CVec3& v) { return json::array({cj(v[0]), cj(v[1]), cj(v[2])}); }

CVec3 jv(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 3) throw ConfigError(std::string(what) + ": expected three components");
    return CVec3{jc(j[0], what), jc(j[1], what), jc(j[2], what)};
}

json cvec(const std::vector<cplx>& v) {
    json a = json::array();
    for (auto z : v) a.push_back(cj(z));
    return a;
}

json svec(const std::vector<CVec3>& v) {
    json a = json::array();
    for (const auto& s : v) a.push_back(vj(s));
    return a;
}

std::vector<cplx> read_cvec(const json& j, const char* key) {
    std::vector<cplx> out;
    if (!j.contains(key)) return out;
    for (const auto& e : j.at(key)) out.push_back(jc(e, key));
    return out;
}

std::vector<CVec3> read_svec(const json& j, const char* key) {
    std::vector<CVec3> out;
    if (!j.contains(key)) return out;
    for (const auto& e : j.at(key)) out.push_back(jv(e, key));
    return out;
}

json state_json(const SpinCMState& st) {
    return json{{"ell", st.params.ell()},   {"delta", st.params.delta()}, {"pole_guard", st.params.pole_guard()},
                {"time", st.time},          {"rho", cj(st.rho)},          {"phi", vj(st.phi)},
                {"a", cvec(st.a)},          {"adot", cvec(st.adot)},      {"s", svec(st.s)},
                {"b", cvec(st.b)},          {"bdot", cvec(st.bdot)},      {"t", svec(st.t)}};
}

SpinCMState state_parse(const json& j) {
    try {
        EllipticParams p(j.at("ell").get<double>(), j.at("delta").get<double>(), j.value("pole_guard", 1e-8));
        SpinCMState st(std::move(p));
        st.time = j.value("time", 0.0);
        st.rho = j.contains("rho") ? jc(j["rho"], "rho") : cplx(1.0, 0.0);
        st.phi = jv(j.at("phi"), "phi");
        st.a = read_cvec(j, "a");
        st.adot = read_cvec(j, "adot");
        st.s = read_svec(j, "s");
        st.b = read_cvec(j, "b");
        st.bdot = read_cvec(j, "bdot");
        st.t = read_svec(j, "t");
        st.validate_shapes();
        return st;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("state JSON: ") + e.what());
    }
}

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
}

Real3 real3(const json& j, const char* key) {
    if (!j.is_array() || j.size() != 3) throw ConfigError(std::string(key) + ": expected three reals");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void reject_unknown(const json& j, std::initializer_list<const char*> known) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw ConfigError("unknown config key '" + it.key() + "'");
    }
}

}  // namespace

std::string state_to_json(const SpinCMState& st, int indent) { return state_json(st).dump(indent); }

SpinCMState state_from_json(const std::string& text) { return state_parse(parse_text(text)); }

std::string trajectory_to_json(const Trajectory& traj, int indent) {
    json states = json::array();
    for (const auto& s : traj.snapshots) states.push_back(state_json(s));
    json j{{"mode", to_string(traj.mode)},
           {"real_mode", traj.real_mode},
           {"reason", to_string(traj.reason)},
           {"message", traj.message},
           {"accepted_steps", traj.accepted},
           {"rejected_steps", traj.rejected},
           {"states", std::move(states)}};
    return j.dump(indent);
}

std::vector<SpinCMState> trajectory_states_from_json(const std::string& text) {
    const json j = parse_text(text);
    if (!j.contains("states")) throw ConfigError("trajectory JSON has no 'states'");
    std::vector<SpinCMState> out;
    for (const auto& s : j["states"]) out.push_back(state_parse(s));
    return out;
}

std::string config_to_json(const JacobiConfig& cfg, int indent) {
    json j{{"kind", "jacobi"}, {"p", cfg.p}, {"q", cfg.q}, {"m", cfg.m}, {"pole_guard", cfg.pole_guard},
           {"phi_tol", cfg.phi_tol}};
    if (cfg.x0_over_K)
        j["x0_over_K"] = json::array({cfg.x0_over_K->num, cfg.x0_over_K->den});
    else
        j["x0"] = cfg.x0;
    return j.dump(indent);
}

std::string config_to_json(const TravelingWaveConfig& cfg, int indent) {
    json j{{"kind", "traveling-wave"}, {"ell", cfg.ell}, {"delta", cfg.delta}, {"phi10", cj(cfg.phi10)},
           {"s10", cj(cfg.s10)},      {"rho", cj(cfg.rho)}, {"n1", cfg.n1},       {"n2", cfg.n2},
           {"a0", cvec(cfg.a0)},      {"b0", cvec(cfg.b0)}};
    return j.dump(indent);
}

JacobiConfig jacobi_config_from_json(const std::string& text) {
    const json j = parse_text(text);
    reject_unknown(j, {"kind", "p", "q", "m", "x0", "x0_over_K", "pole_guard", "phi_tol"});
    try {
        JacobiConfig c;
        c.p = j.value("p", c.p);
        c.q = j.value("q", c.q);
        c.m = j.value("m", c.m);
        c.pole_guard = j.value("pole_guard", c.pole_guard);
        c.phi_tol = j.value("phi_tol", c.phi_tol);
        if (j.contains("x0_over_K")) {
            const auto& r = j["x0_over_K"];
            if (r.is_array() && r.size() == 2)
                c.x0_over_K = Rational{r[0].get<long>(), r[1].get<long>()};
            else if (r.is_number_integer())
                c.x0_over_K = Rational{r.get<long>(), 1};
            else
                throw ConfigError("x0_over_K: expected an integer or [num, den]");
        } else if (j.contains("x0")) {
            c.x0 = j["x0"].get<double>();
        } else {
            c.x0_over_K = Rational{1, 1};
        }
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("jacobi config: ") + e.what());
    }
}

TravelingWaveConfig traveling_wave_config_from_json(const std::string& text) {
    const json j = parse_text(text);
    reject_unknown(j, {"kind", "ell", "delta", "phi10", "s10", "rho", "n1", "n2", "a0", "b0"});
    try {
        TravelingWaveConfig c;
        c.ell = j.value("ell", c.ell);
        c.delta = j.value("delta", c.delta);
        if (j.contains("phi10")) c.phi10 = jc(j["phi10"], "phi10");
        if (j.contains("s10")) c.s10 = jc(j["s10"], "s10");
        if (j.contains("rho")) c.rho = jc(j["rho"], "rho");
        if (j.contains("n1")) c.n1 = real3(j["n1"], "n1");
        if (j.contains("n2")) c.n2 = real3(j["n2"], "n2");
        c.a0 = read_cvec(j, "a0");
        c.b0 = read_cvec(j, "b0");
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("traveling-wave config: ") + e.what());
    }
}

}  // namespace ncihf
