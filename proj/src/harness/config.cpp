#include "igf/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "igf/errors.hpp"
#include "igf/measure_space.hpp"
#include "igf/models.hpp"

namespace igf::harness {

using nlohmann::json;

std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

Eigen::VectorXd json_to_vector(const json& j) {
    if (!j.is_array() || j.empty()) throw InvalidInputError("expected a non-empty numeric array");
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw InvalidInputError("expected a numeric array");
        v[static_cast<int>(i)] = j[i].get<double>();
    }
    return v;
}

Eigen::MatrixXd json_to_matrix(const json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty()) {
        throw InvalidInputError("expected a non-empty array of numeric rows");
    }
    const std::size_t cols = j[0].size();
    Eigen::MatrixXd m(j.size(), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols) {
            throw InvalidInputError("expected rectangular numeric rows");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            if (!j[r][c].is_number()) throw InvalidInputError("expected numeric matrix entries");
            m(static_cast<int>(r), static_cast<int>(c)) = j[r][c].get<double>();
        }
    }
    return m;
}

bool known_drift_name(const std::string& name) { return name == "tanh" || name == "zero"; }

bool known_obs_name(const std::string& name) {
    return name == "tanh" || name == "zero" || name.rfind("const:", 0) == 0;
}

namespace {

const std::set<std::string> kExperiments = {
    "geometry-check", "wonham", "exp-filter", "kalman-bucy",
    "qv-info",        "bridge-density", "decomposition"};

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed,
                std::vector<std::string>& errors) {
    for (const auto& item : obj.items()) {
        if (!allowed.contains(item.key())) {
            errors.push_back(where + ": unknown key '" + item.key() + "'");
        }
    }
}

const json* need(const json& obj, const std::string& where, const std::string& key,
                 std::vector<std::string>& errors) {
    if (!obj.contains(key)) {
        errors.push_back(where + ": missing required key '" + key + "'");
        return nullptr;
    }
    return &obj.at(key);
}

bool positive_number(const json* j, const std::string& what, std::vector<std::string>& errors) {
    if (!j) return false;
    if (!j->is_number() || !(j->get<double>() > 0.0)) {
        errors.push_back(what + ": must be a positive number");
        return false;
    }
    return true;
}

bool integer_at_least(const json* j, long min, const std::string& what,
                      std::vector<std::string>& errors) {
    if (!j) return false;
    if (!j->is_number_integer() || j->get<long>() < min) {
        errors.push_back(what + ": must be an integer >= " + std::to_string(min));
        return false;
    }
    return true;
}

void validate_time_grid(const json& numerics, const std::string& time_key,
                        std::vector<std::string>& errors) {
    const json* t = need(numerics, "numerics", time_key, errors);
    const json* dt = need(numerics, "numerics", "dt", errors);
    const bool ok_t = positive_number(t, "numerics." + time_key, errors);
    const bool ok_dt = positive_number(dt, "numerics.dt", errors);
    if (ok_t && ok_dt) {
        const double ratio = t->get<double>() / dt->get<double>();
        if (std::abs(ratio - std::llround(ratio)) > 1e-9) {
            errors.push_back("numerics: " + time_key + " must be an integer multiple of dt");
        }
    }
}

// constructs the model objects so their own invariant checks run
void deep_model_checks(const std::string& experiment, const json& model,
                       std::vector<std::string>& errors);

void validate_parsed(const json& root, std::vector<std::string>& errors) {
    if (!root.is_object()) {
        errors.push_back("top level: expected a JSON object");
        return;
    }
    check_keys(root, "top level", {"experiment", "model", "numerics", "rng", "output"}, errors);

    const json* exp = need(root, "top level", "experiment", errors);
    std::string tag;
    if (exp) {
        if (!exp->is_string() || !kExperiments.contains(exp->get<std::string>())) {
            errors.push_back("experiment: must be one of geometry-check, wonham, exp-filter, "
                             "kalman-bucy, qv-info, bridge-density, decomposition");
        } else {
            tag = exp->get<std::string>();
        }
    }

    const json* rng = need(root, "top level", "rng", errors);
    if (rng) {
        if (!rng->is_object()) {
            errors.push_back("rng: expected an object");
        } else {
            check_keys(*rng, "rng", {"seed"}, errors);
            const json* seed = need(*rng, "rng", "seed", errors);
            if (seed && (!seed->is_number_integer() || seed->get<long long>() < 0)) {
                errors.push_back("rng.seed: must be a nonnegative integer");
            }
        }
    }

    const json* output = need(root, "top level", "output", errors);
    if (output) {
        if (!output->is_object()) {
            errors.push_back("output: expected an object");
        } else {
            check_keys(*output, "output", {"directory"}, errors);
            const json* dir = need(*output, "output", "directory", errors);
            if (dir && (!dir->is_string() || dir->get<std::string>().empty())) {
                errors.push_back("output.directory: must be a non-empty string");
            }
        }
    }

    const json* model = need(root, "top level", "model", errors);
    const json* numerics = need(root, "top level", "numerics", errors);
    if (!model || !numerics || tag.empty()) return;
    if (!model->is_object()) {
        errors.push_back("model: expected an object");
        return;
    }
    if (!numerics->is_object()) {
        errors.push_back("numerics: expected an object");
        return;
    }

    if (tag == "geometry-check") {
        check_keys(*model, "model", {}, errors);
        check_keys(*numerics, "numerics", {"sizes", "n_pairs"}, errors);
        const json* sizes = need(*numerics, "numerics", "sizes", errors);
        if (sizes) {
            if (!sizes->is_array() || sizes->empty()) {
                errors.push_back("numerics.sizes: must be a non-empty array of integers >= 2");
            } else {
                for (const auto& s : *sizes) {
                    if (!s.is_number_integer() || s.get<long>() < 2) {
                        errors.push_back("numerics.sizes: entries must be integers >= 2");
                        break;
                    }
                }
            }
        }
        integer_at_least(need(*numerics, "numerics", "n_pairs", errors), 1, "numerics.n_pairs", errors);
    } else if (tag == "wonham" || tag == "exp-filter") {
        check_keys(*model, "model", {"rates", "weights", "p0", "h"}, errors);
        need(*model, "model", "rates", errors);
        need(*model, "model", "weights", errors);
        need(*model, "model", "p0", errors);
        need(*model, "model", "h", errors);
        check_keys(*numerics, "numerics", {"T", "dt"}, errors);
        validate_time_grid(*numerics, "T", errors);
    } else if (tag == "kalman-bucy") {
        check_keys(*model, "model", {"B", "A", "C", "m0", "R0"}, errors);
        for (const char* key : {"B", "A", "C", "m0", "R0"}) need(*model, "model", key, errors);
        check_keys(*numerics, "numerics", {"T", "dt"}, errors);
        validate_time_grid(*numerics, "T", errors);
    } else if (tag == "qv-info") {
        check_keys(*model, "model", {"h_values", "p0", "weights"}, errors);
        need(*model, "model", "h_values", errors);
        need(*model, "model", "p0", errors);
        check_keys(*numerics, "numerics", {"T", "dt", "n_replicates"}, errors);
        validate_time_grid(*numerics, "T", errors);
        integer_at_least(need(*numerics, "numerics", "n_replicates", errors), 2,
                         "numerics.n_replicates", errors);
    } else if (tag == "bridge-density") {
        check_keys(*model, "model", {"drift", "obs", "bound", "prior_variance"}, errors);
        const json* drift = need(*model, "model", "drift", errors);
        if (drift && (!drift->is_string() || !known_drift_name(drift->get<std::string>()))) {
            errors.push_back("model.drift: unknown drift name (expected tanh or zero)");
        }
        const json* obs = need(*model, "model", "obs", errors);
        if (obs && (!obs->is_string() || !known_obs_name(obs->get<std::string>()))) {
            errors.push_back("model.obs: unknown observation name (tanh, zero, const:<v>)");
        }
        positive_number(need(*model, "model", "bound", errors), "model.bound", errors);
        positive_number(need(*model, "model", "prior_variance", errors), "model.prior_variance",
                        errors);
        check_keys(*numerics, "numerics",
                   {"t", "dt", "x_grid", "n_bridges", "n_substeps"}, errors);
        validate_time_grid(*numerics, "t", errors);
        integer_at_least(need(*numerics, "numerics", "n_bridges", errors), 2, "numerics.n_bridges",
                         errors);
        integer_at_least(need(*numerics, "numerics", "n_substeps", errors), 2,
                         "numerics.n_substeps", errors);
        const json* grid = need(*numerics, "numerics", "x_grid", errors);
        if (grid) {
            if (!grid->is_object()) {
                errors.push_back("numerics.x_grid: expected an object");
            } else {
                check_keys(*grid, "numerics.x_grid", {"min", "max", "points"}, errors);
                const json* lo = need(*grid, "numerics.x_grid", "min", errors);
                const json* hi = need(*grid, "numerics.x_grid", "max", errors);
                integer_at_least(need(*grid, "numerics.x_grid", "points", errors), 2,
                                 "numerics.x_grid.points", errors);
                if (lo && hi && lo->is_number() && hi->is_number() &&
                    !(lo->get<double>() < hi->get<double>())) {
                    errors.push_back("numerics.x_grid: min must be below max");
                }
            }
        }
    } else if (tag == "decomposition") {
        check_keys(*model, "model", {"alphabet"}, errors);
        integer_at_least(need(*model, "model", "alphabet", errors), 2, "model.alphabet", errors);
        check_keys(*numerics, "numerics", {"n_tables"}, errors);
        integer_at_least(need(*numerics, "numerics", "n_tables", errors), 1, "numerics.n_tables",
                         errors);
    }

    if (errors.empty()) deep_model_checks(tag, *model, errors);
}

void deep_model_checks(const std::string& experiment, const json& model,
                       std::vector<std::string>& errors) {
    try {
        if (experiment == "wonham" || experiment == "exp-filter") {
            const Eigen::MatrixXd rates = json_to_matrix(model.at("rates"));
            const Eigen::VectorXd weights = json_to_vector(model.at("weights"));
            const Eigen::MatrixXd h = json_to_matrix(model.at("h"));
            const igf::MeasureSpace space{weights};
            const igf::DensityVector p0{space, json_to_vector(model.at("p0"))};
            if (h.cols() != weights.size()) {
                errors.push_back("model.h: column count must equal the state count");
            }
            (void)p0;
            const igf::RateGenerator gen{rates, weights};
            (void)gen;
        } else if (experiment == "kalman-bucy") {
            igf::LinearGaussianModel lg{json_to_matrix(model.at("B")), json_to_matrix(model.at("A")),
                                        json_to_matrix(model.at("C")), json_to_vector(model.at("m0")),
                                        json_to_matrix(model.at("R0"))};
            lg.validate();
        } else if (experiment == "qv-info") {
            const Eigen::VectorXd h = json_to_vector(model.at("h_values"));
            const Eigen::VectorXd weights =
                model.contains("weights")
                    ? json_to_vector(model.at("weights"))
                    : Eigen::VectorXd::Constant(h.size(), 1.0 / static_cast<double>(h.size()));
            const igf::MeasureSpace space{weights};
            const igf::DensityVector p0{space, json_to_vector(model.at("p0"))};
            if (p0.size() != h.size()) errors.push_back("model.p0: length must match h_values");
        }
    } catch (const igf::Error& e) {
        errors.push_back(std::string("model: ") + e.what());
    }
}

}  // namespace

std::vector<std::string> validate_config_text(const std::string& text) {
    std::vector<std::string> errors;
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        errors.push_back(std::string("parse error: ") + e.what());
        return errors;
    }
    validate_parsed(root, errors);
    return errors;
}

ExperimentConfig parse_config_text(const std::string& text) {
    const auto errors = validate_config_text(text);
    if (!errors.empty()) {
        std::ostringstream msg;
        msg << "configuration invalid:";
        for (const auto& e : errors) msg << "\n  - " << e;
        throw ConfigError(msg.str());
    }
    const json root = json::parse(text);
    ExperimentConfig cfg;
    cfg.experiment = root.at("experiment").get<std::string>();
    cfg.model = root.at("model");
    cfg.numerics = root.at("numerics");
    cfg.seed = root.at("rng").at("seed").get<std::uint64_t>();
    cfg.output_directory = root.at("output").at("directory").get<std::string>();
    cfg.canonical = root.dump();  // nlohmann objects keep sorted keys
    cfg.config_hash = fnv1a_hash(cfg.canonical);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream stream(path, std::ios::binary);
    if (!stream) throw IoError("load_config: cannot open " + path.string());
    std::ostringstream buffer;
    buffer << stream.rdbuf();
    return parse_config_text(buffer.str());
}

}  // namespace igf::harness
