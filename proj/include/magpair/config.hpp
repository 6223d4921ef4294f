// Run configuration: a single JSON document holding the physical parameters
// and the scenario. All physics must be explicit in the file; defaults exist
// only for harness knobs (output paths, stride, control period) and for the
// two values whose defaults are part of the model contract
// (relative_permeability = 1, alpha = 0). Parsing is strict: unknown or
// missing keys fail with the offending key named.
#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "magpair/metrics.hpp"
#include "magpair/scenario.hpp"

namespace magpair {

using json = nlohmann::ordered_json;

struct RunConfig {
    PhysicalParams physical;
    ScenarioSpec scenario;
    std::string output_dir = "out";
    int trace_stride = 1;

    void validate() const {
        physical.validate();
        scenario.validate();
        if (trace_stride < 1) throw config_error("trace_stride must be >= 1");
    }
};

namespace detail {

inline double expect_number(const json& obj, const std::string& key, const std::string& context) {
    if (!obj.contains(key)) throw config_error("missing key '" + context + "." + key + "'");
    if (!obj[key].is_number()) throw config_error("key '" + context + "." + key + "' must be a number");
    return obj[key].get<double>();
}

inline double optional_number(const json& obj, const std::string& key, const std::string& context,
                              double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw config_error("key '" + context + "." + key + "' must be a number");
    return obj[key].get<double>();
}

inline const json& expect_object(const json& obj, const std::string& key, const std::string& context) {
    if (!obj.contains(key)) throw config_error("missing key '" + context + "." + key + "'");
    if (!obj[key].is_object()) throw config_error("key '" + context + "." + key + "' must be an object");
    return obj[key];
}

inline void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                                const std::string& context) {
    for (const auto& item : obj.items()) {
        if (!allowed.contains(item.key())) {
            throw config_error("unknown key '" + context + "." + item.key() + "'");
        }
    }
}

}  // namespace detail

inline ControllerType controller_type_from_string(const std::string& name) {
    if (name == "p") return ControllerType::P;
    if (name == "pid") return ControllerType::Pid;
    if (name == "pid_pd") return ControllerType::PidPd;
    throw config_error("controller.type must be one of: p, pid, pid_pd (got '" + name + "')");
}

inline const char* controller_type_name(ControllerType type) {
    switch (type) {
        case ControllerType::P: return "p";
        case ControllerType::Pid: return "pid";
        case ControllerType::PidPd: return "pid_pd";
    }
    return "pid";
}

inline RunConfig parse_run_config(const json& root) {
    using detail::expect_number;
    using detail::expect_object;
    using detail::optional_number;
    using detail::reject_unknown_keys;

    if (!root.is_object()) throw config_error("config root must be an object");
    reject_unknown_keys(root, {"physical", "scenario", "output_dir", "trace_stride"}, "config");

    RunConfig config;

    const json& phys = expect_object(root, "physical", "config");
    reject_unknown_keys(phys,
                        {"magnetization", "agent_radius", "medium_viscosity",
                         "relative_permeability", "max_error_angle"},
                        "physical");
    config.physical.magnetization = expect_number(phys, "magnetization", "physical");
    config.physical.agent_radius = expect_number(phys, "agent_radius", "physical");
    config.physical.medium_viscosity = expect_number(phys, "medium_viscosity", "physical");
    config.physical.relative_permeability =
        optional_number(phys, "relative_permeability", "physical", 1.0);
    config.physical.max_error_angle = expect_number(phys, "max_error_angle", "physical");

    const json& scen = expect_object(root, "scenario", "config");
    reject_unknown_keys(scen,
                        {"initial_r", "initial_phi", "targets", "duration", "control_period",
                         "controller", "envelope", "integrator"},
                        "scenario");
    auto& spec = config.scenario;
    spec.initial_r = expect_number(scen, "initial_r", "scenario");
    spec.initial_phi = expect_number(scen, "initial_phi", "scenario");
    spec.duration = expect_number(scen, "duration", "scenario");
    spec.control_period = optional_number(scen, "control_period", "scenario", 1e-4);

    if (!scen.contains("targets") || !scen["targets"].is_array() || scen["targets"].empty()) {
        throw config_error("'scenario.targets' must be a non-empty array");
    }
    for (std::size_t i = 0; i < scen["targets"].size(); ++i) {
        const json& target = scen["targets"][i];
        const std::string context = "scenario.targets[" + std::to_string(i) + "]";
        if (!target.is_object()) throw config_error(context + " must be an object");
        reject_unknown_keys(target, {"start_time", "r_des"}, context);
        spec.target_schedule.push_back(
            {expect_number(target, "start_time", context), expect_number(target, "r_des", context)});
    }

    const json& ctrl = expect_object(scen, "controller", "scenario");
    reject_unknown_keys(ctrl,
                        {"type", "k_p", "k_i", "k_d", "error_unit_scale", "p_error_mode", "smoother"},
                        "controller");
    if (!ctrl.contains("type") || !ctrl["type"].is_string()) {
        throw config_error("missing key 'controller.type'");
    }
    spec.controller.type = controller_type_from_string(ctrl["type"].get<std::string>());
    spec.controller.gains.k_p = expect_number(ctrl, "k_p", "controller");
    spec.controller.gains.error_unit_scale =
        optional_number(ctrl, "error_unit_scale", "controller", 1e-6);
    if (spec.controller.type == ControllerType::P) {
        spec.controller.gains.k_i = optional_number(ctrl, "k_i", "controller", 0.0);
        spec.controller.gains.k_d = optional_number(ctrl, "k_d", "controller", 0.0);
        if (spec.controller.gains.k_i != 0.0 || spec.controller.gains.k_d != 0.0) {
            throw config_error("'controller.k_i'/'controller.k_d' must be 0 for type p");
        }
        if (ctrl.contains("p_error_mode")) {
            if (!ctrl["p_error_mode"].is_string()) {
                throw config_error("key 'controller.p_error_mode' must be a string");
            }
            const auto mode = ctrl["p_error_mode"].get<std::string>();
            if (mode == "signed") {
                spec.controller.p_error_mode = PErrorMode::Signed;
            } else if (mode == "absolute") {
                spec.controller.p_error_mode = PErrorMode::Absolute;
            } else {
                throw config_error("controller.p_error_mode must be 'signed' or 'absolute'");
            }
        }
    } else {
        spec.controller.gains.k_i = expect_number(ctrl, "k_i", "controller");
        spec.controller.gains.k_d = expect_number(ctrl, "k_d", "controller");
        if (ctrl.contains("p_error_mode")) {
            throw config_error("'controller.p_error_mode' is only valid for type p");
        }
    }
    if (spec.controller.type == ControllerType::PidPd) {
        const json& sm = expect_object(ctrl, "smoother", "controller");
        reject_unknown_keys(sm, {"k_p2", "k_d2"}, "controller.smoother");
        spec.controller.smoother.k_p2 = expect_number(sm, "k_p2", "controller.smoother");
        spec.controller.smoother.k_d2 = expect_number(sm, "k_d2", "controller.smoother");
    } else if (ctrl.contains("smoother")) {
        throw config_error("'controller.smoother' is only valid for type pid_pd");
    }

    const json& env = expect_object(scen, "envelope", "scenario");
    reject_unknown_keys(env, {"r_min", "r_max", "epsilon"}, "envelope");
    spec.envelope.r_min = expect_number(env, "r_min", "envelope");
    spec.envelope.r_max = expect_number(env, "r_max", "envelope");
    spec.envelope.epsilon = expect_number(env, "epsilon", "envelope");

    const json& integ = expect_object(scen, "integrator", "scenario");
    reject_unknown_keys(integ, {"dt", "epsilon_floor", "alpha"}, "integrator");
    spec.integrator.dt = expect_number(integ, "dt", "integrator");
    spec.integrator.epsilon_floor = expect_number(integ, "epsilon_floor", "integrator");
    spec.integrator.alpha = optional_number(integ, "alpha", "integrator", 0.0);

    if (root.contains("output_dir")) {
        if (!root["output_dir"].is_string()) throw config_error("'output_dir' must be a string");
        config.output_dir = root["output_dir"].get<std::string>();
    }
    if (root.contains("trace_stride")) {
        if (!root["trace_stride"].is_number_integer()) {
            throw config_error("'trace_stride' must be an integer");
        }
        config.trace_stride = root["trace_stride"].get<int>();
    }

    try {
        config.validate();
    } catch (const std::domain_error& e) {
        throw config_error(std::string("invalid config: ") + e.what());
    }
    return config;
}

/// Canonical emission: every field materialized, stable key order. Feeding
/// the output back through parse_run_config reproduces the same RunConfig.
inline json to_json(const RunConfig& config) {
    json root;
    root["physical"] = {{"magnetization", config.physical.magnetization},
                        {"agent_radius", config.physical.agent_radius},
                        {"medium_viscosity", config.physical.medium_viscosity},
                        {"relative_permeability", config.physical.relative_permeability},
                        {"max_error_angle", config.physical.max_error_angle}};
    json targets = json::array();
    for (const auto& target : config.scenario.target_schedule) {
        targets.push_back({{"start_time", target.start_time}, {"r_des", target.r_des}});
    }
    json controller;
    controller["type"] = controller_type_name(config.scenario.controller.type);
    controller["k_p"] = config.scenario.controller.gains.k_p;
    controller["k_i"] = config.scenario.controller.gains.k_i;
    controller["k_d"] = config.scenario.controller.gains.k_d;
    controller["error_unit_scale"] = config.scenario.controller.gains.error_unit_scale;
    if (config.scenario.controller.type == ControllerType::P) {
        controller["p_error_mode"] =
            config.scenario.controller.p_error_mode == PErrorMode::Absolute ? "absolute" : "signed";
    }
    if (config.scenario.controller.type == ControllerType::PidPd) {
        controller["smoother"] = {{"k_p2", config.scenario.controller.smoother.k_p2},
                                  {"k_d2", config.scenario.controller.smoother.k_d2}};
    }
    root["scenario"] = {
        {"initial_r", config.scenario.initial_r},
        {"initial_phi", config.scenario.initial_phi},
        {"targets", targets},
        {"duration", config.scenario.duration},
        {"control_period", config.scenario.control_period},
        {"controller", controller},
        {"envelope",
         {{"r_min", config.scenario.envelope.r_min},
          {"r_max", config.scenario.envelope.r_max},
          {"epsilon", config.scenario.envelope.epsilon}}},
        {"integrator",
         {{"dt", config.scenario.integrator.dt},
          {"epsilon_floor", config.scenario.integrator.epsilon_floor},
          {"alpha", config.scenario.integrator.alpha}}},
    };
    root["output_dir"] = config.output_dir;
    root["trace_stride"] = config.trace_stride;
    return root;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw config_error("cannot open config file: " + path);
    json root;
    try {
        root = json::parse(file);
    } catch (const json::parse_error& e) {
        throw config_error("config is not valid JSON (" + path + "): " + e.what());
    }
    return parse_run_config(root);
}

/// Parameters cmd_sweep may vary, and where they land in the config.
inline const std::vector<std::string>& sweep_parameter_whitelist() {
    static const std::vector<std::string> names = {
        "medium_viscosity", "k_p", "k_i", "k_d", "k_p2", "k_d2", "dt", "initial_r",
    };
    return names;
}

inline void apply_sweep_value(RunConfig& config, const std::string& parameter, double value) {
    if (parameter == "medium_viscosity") {
        config.physical.medium_viscosity = value;
    } else if (parameter == "k_p") {
        config.scenario.controller.gains.k_p = value;
    } else if (parameter == "k_i") {
        config.scenario.controller.gains.k_i = value;
    } else if (parameter == "k_d") {
        config.scenario.controller.gains.k_d = value;
    } else if (parameter == "k_p2") {
        config.scenario.controller.smoother.k_p2 = value;
    } else if (parameter == "k_d2") {
        config.scenario.controller.smoother.k_d2 = value;
    } else if (parameter == "dt") {
        config.scenario.integrator.dt = value;
    } else if (parameter == "initial_r") {
        config.scenario.initial_r = value;
    } else {
        std::string known;
        for (const auto& name : sweep_parameter_whitelist()) {
            known += known.empty() ? name : ", " + name;
        }
        throw config_error("unknown sweep parameter '" + parameter + "' (known: " + known + ")");
    }
    try {
        config.validate();
    } catch (const std::domain_error& e) {
        throw config_error(std::string("invalid config after sweep override: ") + e.what());
    }
}

}  // namespace magpair
