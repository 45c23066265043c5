#include "config.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>

namespace fairdyn::cli {

using nlohmann::json;

namespace {

using cli::to_json;

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
    if (!j.is_object()) fail(path, "expected an object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) fail(join(path, it.key()), "unknown field");
}

const json& field(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) fail(join(path, key), "missing");
    return j.at(key);
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "must be finite");
    return v;
}

double number(const json& j, const std::string& path, const char* key) {
    return number(field(j, path, key), join(path, key));
}

double number_or(const json& j, const std::string& path, const char* key, double dflt) {
    return j.contains(key) ? number(j.at(key), join(path, key)) : dflt;
}

int integer(const json& j, const std::string& path, int lo) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    const long long v = j.get<long long>();
    if (v < lo || v > 1000000000) fail(path, "out of range");
    return static_cast<int>(v);
}

std::string text(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], index(path, i)));
    return out;
}

TransitionMatrix transitions_from_json(const json& j, const std::string& path) {
    TransitionMatrix t;
    if (j.is_array()) {
        if (j.size() != 4) fail(path, "expected [t00, t01, t10, t11]");
        t = {number(j[0], index(path, 0)), number(j[1], index(path, 1)),
             number(j[2], index(path, 2)), number(j[3], index(path, 3))};
    } else {
        only_keys(j, path, {"t00", "t01", "t10", "t11"});
        t = {number(j, path, "t00"), number(j, path, "t01"), number(j, path, "t10"),
             number(j, path, "t11")};
    }
    try {
        t.validate(path);
    } catch (const ModelError& e) {
        throw ConfigError(e.what());
    }
    return t;
}

json to_json(const TransitionMatrix& t) {
    return {{"t00", t.t00}, {"t01", t.t01}, {"t10", t.t10}, {"t11", t.t11}};
}

GaussianClass gaussian_class_from_json(const json& j, const std::string& path) {
    only_keys(j, path, {"mean", "cov"});
    const std::vector<double> mean = numbers(field(j, path, "mean"), join(path, "mean"));
    const json& cov = field(j, path, "cov");
    const std::string cpath = join(path, "cov");
    if (!cov.is_array() || cov.size() != mean.size())
        fail(cpath, "expected a " + std::to_string(mean.size()) + "x" +
                        std::to_string(mean.size()) + " matrix");
    GaussianClass c;
    c.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    c.cov.resize(c.mean.size(), c.mean.size());
    for (std::size_t r = 0; r < mean.size(); ++r) {
        const std::vector<double> row = numbers(cov[r], index(cpath, r));
        if (row.size() != mean.size()) fail(index(cpath, r), "wrong row length");
        for (std::size_t k = 0; k < row.size(); ++k)
            c.cov(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = row[k];
    }
    return c;
}

json to_json(const GaussianClass& c) {
    json mean = json::array(), cov = json::array();
    for (Eigen::Index i = 0; i < c.mean.size(); ++i) mean.push_back(c.mean[i]);
    for (Eigen::Index r = 0; r < c.cov.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index k = 0; k < c.cov.cols(); ++k) row.push_back(c.cov(r, k));
        cov.push_back(row);
    }
    return {{"mean", mean}, {"cov", cov}};
}

HighdimSpec highdim_from_json(const json& j, const std::string& path) {
    only_keys(j, path, {"class0", "class1", "samples", "source", "score_table"});
    HighdimSpec h;
    if (j.contains("score_table")) {
        if (j.contains("class0") || j.contains("class1"))
            fail(path, "give either class parameters or a score table, not both");
        const json& t = j.at("score_table");
        const std::string tp = join(path, "score_table");
        only_keys(t, tp, {"grid", "density0", "density1"});
        h.grid = numbers(field(t, tp, "grid"), join(tp, "grid"));
        h.density0 = numbers(field(t, tp, "density0"), join(tp, "density0"));
        h.density1 = numbers(field(t, tp, "density1"), join(tp, "density1"));
        return h;
    }
    h.classes = std::pair{gaussian_class_from_json(field(j, path, "class0"), join(path, "class0")),
                          gaussian_class_from_json(field(j, path, "class1"), join(path, "class1"))};
    if (j.contains("samples")) h.samples = integer(j.at("samples"), join(path, "samples"), 10000);
    if (j.contains("source")) {
        const std::string src = text(j.at("source"), join(path, "source"));
        if (src == "automatic") h.source = ScoreSource::automatic;
        else if (src == "sampled") h.source = ScoreSource::sampled;
        else fail(join(path, "source"), "expected \"automatic\" or \"sampled\"");
    }
    return h;
}

json to_json(const HighdimSpec& h) {
    if (!h.classes)
        return {{"score_table", {{"grid", h.grid}, {"density0", h.density0}, {"density1", h.density1}}}};
    return {{"class0", to_json(h.classes->first)},
            {"class1", to_json(h.classes->second)},
            {"samples", h.samples},
            {"source", h.source == ScoreSource::sampled ? "sampled" : "automatic"}};
}

GroupModel reduce(const HighdimSpec& h, const TransitionMatrix& t, double share,
                  std::uint64_t seed, const std::string& path) {
    try {
        if (!h.classes) {
            GroupModel m;
            m.g0 = FeatureDistribution::tabulated(h.grid, h.density0);
            m.g1 = FeatureDistribution::tabulated(h.grid, h.density1);
            m.transitions = t;
            m.share = share;
            return m;
        }
        const ExpFamilyGroup g = gaussian_group(h.classes->first, h.classes->second, t, share);
        return reduce_to_1d(g, h.samples, seed, h.source);
    } catch (const ModelError& e) {
        fail(path, e.what());
    }
}

GroupModel group_from_json(const json& j, const std::string& path, std::uint64_t seed,
                           std::optional<HighdimSpec>& highdim) {
    only_keys(j, path, {"share", "g0", "g1", "transitions", "highdim"});
    const TransitionMatrix t = transitions_from_json(field(j, path, "transitions"),
                                                     join(path, "transitions"));
    const double share = number(j, path, "share");
    if (j.contains("highdim")) {
        if (j.contains("g0") || j.contains("g1"))
            fail(path, "give either g0/g1 or a highdim block, not both");
        highdim = highdim_from_json(j.at("highdim"), join(path, "highdim"));
        return reduce(*highdim, t, share, seed, join(path, "highdim"));
    }
    GroupModel g;
    g.g0 = distribution_from_json(field(j, path, "g0"), join(path, "g0"));
    g.g1 = distribution_from_json(field(j, path, "g1"), join(path, "g1"));
    g.transitions = t;
    g.share = share;
    return g;
}

json group_to_json(const GroupModel& g, const std::optional<HighdimSpec>& h) {
    json j = {{"share", g.share}, {"transitions", to_json(g.transitions)}};
    if (h) {
        j["highdim"] = to_json(*h);
    } else {
        j["g0"] = to_json(g.g0);
        j["g1"] = to_json(g.g1);
    }
    return j;
}

std::pair<double, double> utility_from_json(const json& j, const std::string& path) {
    only_keys(j, path, {"u_plus", "u_minus"});
    const double up = number_or(j, path, "u_plus", 1.0);
    const double um = number_or(j, path, "u_minus", 1.0);
    if (!(up > 0.0)) fail(join(path, "u_plus"), "must be positive");
    if (!(um > 0.0)) fail(join(path, "u_minus"), "must be positive");
    return {up, um};
}

bool is_transition_parameter(const std::string& name) {
    return name == "t00" || name == "t01" || name == "t10" || name == "t11";
}

void check_axis(const SweepAxis& ax, const std::string& path) {
    const std::string& p = ax.parameter;
    const bool grouped = (p.size() == 5 && (p[0] == 'a' || p[0] == 'b') && p[1] == '.' &&
                          is_transition_parameter(p.substr(2)));
    if (!(grouped || is_transition_parameter(p) || p == "u_ratio"))
        fail(join(path, "parameter"), "unknown sweep parameter '" + p + "'");
    if (ax.values.empty()) fail(join(path, "values"), "sweep grid is empty");
    for (std::size_t i = 0; i < ax.values.size(); ++i) {
        const double v = ax.values[i];
        if (p == "u_ratio") {
            if (!(v > 0.0)) fail(index(join(path, "values"), i), "utility ratio must be positive");
        } else if (!(v > 0.0 && v < 1.0)) {
            fail(index(join(path, "values"), i), "grid entry must lie strictly inside (0, 1)");
        }
    }
}

SweepAxis axis_from_json(const json& j, const std::string& path) {
    SweepAxis ax;
    ax.parameter = text(field(j, path, "parameter"), join(path, "parameter"));
    ax.values = numbers(field(j, path, "values"), join(path, "values"));
    check_axis(ax, path);
    return ax;
}

GenerationSpec generation_from_json(const json& j, const std::string& path) {
    only_keys(j, path, {"g00", "g01", "g10", "g11", "transitions", "utility", "variant",
                        "initial_alpha"});
    GenerationSpec g;
    g.model.g00 = distribution_from_json(field(j, path, "g00"), join(path, "g00"));
    g.model.g01 = distribution_from_json(field(j, path, "g01"), join(path, "g01"));
    g.model.g10 = distribution_from_json(field(j, path, "g10"), join(path, "g10"));
    g.model.g11 = distribution_from_json(field(j, path, "g11"), join(path, "g11"));
    g.model.transitions = transitions_from_json(field(j, path, "transitions"),
                                                join(path, "transitions"));
    if (j.contains("utility")) {
        std::tie(g.model.u_plus, g.model.u_minus) =
            utility_from_json(j.at("utility"), join(path, "utility"));
    }
    if (j.contains("variant")) {
        const std::string v = text(j.at("variant"), join(path, "variant"));
        if (v == "unqualified-side") g.variant = GenVariant::unqualified_side;
        else if (v == "qualified-side") g.variant = GenVariant::qualified_side;
        else fail(join(path, "variant"), "expected \"unqualified-side\" or \"qualified-side\"");
    }
    if (j.contains("initial_alpha")) {
        g.initial_alpha = numbers(j.at("initial_alpha"), join(path, "initial_alpha"));
        for (std::size_t i = 0; i < g.initial_alpha.size(); ++i)
            if (!(g.initial_alpha[i] >= 0.0 && g.initial_alpha[i] <= 1.0))
                fail(index(join(path, "initial_alpha"), i), "must lie in [0, 1]");
    }
    try {
        g.model.validate();
    } catch (const ModelError& e) {
        fail(path, e.what());
    }
    return g;
}

json to_json(const GenerationSpec& g) {
    json j = {{"g00", to_json(g.model.g00)},
              {"g01", to_json(g.model.g01)},
              {"g10", to_json(g.model.g10)},
              {"g11", to_json(g.model.g11)},
              {"transitions", to_json(g.model.transitions)},
              {"utility", {{"u_plus", g.model.u_plus}, {"u_minus", g.model.u_minus}}},
              {"initial_alpha", g.initial_alpha}};
    if (g.variant) j["variant"] = to_string(*g.variant);
    return j;
}

}  // namespace

FeatureDistribution distribution_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected a distribution object");
    const std::string kind = text(field(j, path, "kind"), join(path, "kind"));
    try {
        if (kind == "gaussian") {
            only_keys(j, path, {"kind", "mean", "stddev"});
            return FeatureDistribution::gaussian(number(j, path, "mean"), number(j, path, "stddev"));
        }
        if (kind == "beta") {
            only_keys(j, path, {"kind", "a", "b"});
            return FeatureDistribution::beta(number(j, path, "a"), number(j, path, "b"));
        }
        if (kind == "tabulated") {
            only_keys(j, path, {"kind", "grid", "density"});
            return FeatureDistribution::tabulated(numbers(field(j, path, "grid"), join(path, "grid")),
                                                  numbers(field(j, path, "density"),
                                                          join(path, "density")));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const ModelError& e) {
        fail(path, e.what());
    }
    fail(join(path, "kind"), "unknown distribution kind '" + kind + "'");
}

json to_json(const FeatureDistribution& d) {
    switch (d.kind()) {
    case DistKind::gaussian:
        return {{"kind", "gaussian"}, {"mean", d.gaussian_mean()}, {"stddev", d.gaussian_stddev()}};
    case DistKind::beta: return {{"kind", "beta"}, {"a", d.beta_a()}, {"b", d.beta_b()}};
    case DistKind::tabulated:
        return {{"kind", "tabulated"}, {"grid", d.grid()}, {"density", d.input_density()}};
    }
    return {};
}

ScenarioConfig parse_config(const json& j) {
    only_keys(j, "config", {"seed", "output", "constraints", "utility", "groups", "initial_states",
                            "random_initial_states", "simulation", "sweep", "generation"});
    ScenarioConfig c;
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) fail("seed", "expected a non-negative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("output")) c.output = text(j.at("output"), "output");

    if (j.contains("groups")) {
        const json& g = j.at("groups");
        only_keys(g, "groups", {"a", "b"});
        Scenario s;
        s.a = group_from_json(field(g, "groups", "a"), "groups.a", c.seed, c.highdim_a);
        s.b = group_from_json(field(g, "groups", "b"), "groups.b", c.seed + 1, c.highdim_b);
        if (j.contains("utility")) std::tie(s.u_plus, s.u_minus) = utility_from_json(j.at("utility"), "utility");
        try {
            s.validate();
        } catch (const ModelError& e) {
            throw ConfigError(e.what());
        }
        c.scenario = s;
    } else if (!j.contains("generation")) {
        fail("groups", "missing (a config needs groups, a generation block, or both)");
    }

    if (j.contains("constraints")) {
        const json& cs = j.at("constraints");
        if (!cs.is_array()) fail("constraints", "expected an array of names");
        for (std::size_t i = 0; i < cs.size(); ++i) {
            try {
                c.constraints.push_back(parse_constraint(text(cs[i], index("constraints", i))));
            } catch (const ConfigError&) {
                throw;
            } catch (const ModelError& e) {
                fail(index("constraints", i), e.what());
            }
        }
    }

    if (j.contains("initial_states")) {
        const json& is = j.at("initial_states");
        if (!is.is_array()) fail("initial_states", "expected an array of [alpha_a, alpha_b]");
        for (std::size_t i = 0; i < is.size(); ++i) {
            const std::vector<double> v = numbers(is[i], index("initial_states", i));
            if (v.size() != 2) fail(index("initial_states", i), "expected [alpha_a, alpha_b]");
            for (double x : v)
                if (!(x >= 0.0 && x <= 1.0)) fail(index("initial_states", i), "rates must lie in [0, 1]");
            c.initial_states.push_back({v[0], v[1]});
        }
    }
    if (j.contains("random_initial_states"))
        c.random_initial = integer(j.at("random_initial_states"), "random_initial_states", 0);

    if (j.contains("simulation")) {
        const json& sj = j.at("simulation");
        only_keys(sj, "simulation", {"max_steps", "tol", "window", "max_period"});
        if (sj.contains("max_steps"))
            c.simulation.max_steps = integer(sj.at("max_steps"), "simulation.max_steps", 1);
        if (sj.contains("tol")) {
            c.simulation.tol = number(sj.at("tol"), "simulation.tol");
            if (!(c.simulation.tol > 0.0)) fail("simulation.tol", "must be positive");
        }
        if (sj.contains("window"))
            c.simulation.window = integer(sj.at("window"), "simulation.window", 4);
        if (sj.contains("max_period"))
            c.simulation.max_period = integer(sj.at("max_period"), "simulation.max_period", 2);
    }

    if (j.contains("sweep")) {
        const json& sw = j.at("sweep");
        if (!sw.is_array() || sw.empty()) fail("sweep", "expected a nonempty array of axes");
        for (std::size_t i = 0; i < sw.size(); ++i) {
            const std::string p = index("sweep", i);
            only_keys(sw[i], p, {"parameter", "values", "linked"});
            SweepAxis ax = axis_from_json(sw[i], p);
            if (sw[i].contains("linked")) {
                const json& ln = sw[i].at("linked");
                const std::string lp = join(p, "linked");
                if (!ln.is_array()) fail(lp, "expected an array of axes");
                for (std::size_t k = 0; k < ln.size(); ++k) {
                    const std::string q = index(lp, k);
                    only_keys(ln[k], q, {"parameter", "values"});
                    SweepAxis sub = axis_from_json(ln[k], q);
                    if (sub.values.size() != ax.values.size())
                        fail(join(q, "values"), "linked axis needs " + std::to_string(ax.values.size()) +
                                                    " values");
                    ax.linked.push_back(std::move(sub));
                }
            }
            c.sweep.push_back(std::move(ax));
        }
        if (!c.scenario) fail("sweep", "needs groups");
    }

    if (j.contains("generation")) c.generation = generation_from_json(j.at("generation"), "generation");
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_config(j);
}

json to_json(const ScenarioConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["output"] = c.output;
    json cs = json::array();
    for (Constraint k : c.constraints) cs.push_back(to_string(k));
    j["constraints"] = cs;
    if (c.scenario) {
        j["utility"] = {{"u_plus", c.scenario->u_plus}, {"u_minus", c.scenario->u_minus}};
        j["groups"] = {{"a", group_to_json(c.scenario->a, c.highdim_a)},
                       {"b", group_to_json(c.scenario->b, c.highdim_b)}};
    }
    json is = json::array();
    for (const QualState& q : c.initial_states) is.push_back({q.alpha_a, q.alpha_b});
    j["initial_states"] = is;
    j["random_initial_states"] = c.random_initial;
    j["simulation"] = {{"max_steps", c.simulation.max_steps},
                       {"tol", c.simulation.tol},
                       {"window", c.simulation.window},
                       {"max_period", c.simulation.max_period}};
    if (!c.sweep.empty()) {
        json sw = json::array();
        for (const SweepAxis& ax : c.sweep) {
            json a = {{"parameter", ax.parameter}, {"values", ax.values}};
            for (const SweepAxis& l : ax.linked)
                a["linked"].push_back({{"parameter", l.parameter}, {"values", l.values}});
            sw.push_back(a);
        }
        j["sweep"] = sw;
    }
    if (c.generation) j["generation"] = to_json(*c.generation);
    return j;
}

std::vector<QualState> ScenarioConfig::all_initial_states() const {
    std::vector<QualState> out = initial_states;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.02, 0.98);
    for (int i = 0; i < random_initial; ++i) {
        const double a = u(rng);
        out.push_back({a, u(rng)});
    }
    return out;
}

std::vector<Constraint> ScenarioConfig::active_constraints() const {
    if (constraints.empty()) return {kAllConstraints.begin(), kAllConstraints.end()};
    return constraints;
}

std::vector<std::string> sweep_columns(const std::vector<SweepAxis>& axes) {
    std::vector<std::string> out;
    for (const SweepAxis& ax : axes) {
        out.push_back(ax.parameter);
        for (const SweepAxis& l : ax.linked) out.push_back(l.parameter);
    }
    return out;
}

Scenario apply_sweep_point(const Scenario& s, const std::vector<SweepAxis>& axes,
                           const std::vector<double>& point) {
    Scenario out = s;
    const std::vector<std::string> columns = sweep_columns(axes);
    if (point.size() != columns.size()) throw ConfigError("sweep: point has the wrong length");
    for (std::size_t i = 0; i < columns.size(); ++i) {
        const std::string& p = columns[i];
        const double v = point[i];
        if (p == "u_ratio") {
            out.u_plus = v * out.u_minus;
            continue;
        }
        const std::string entry = p.size() == 5 ? p.substr(2) : p;
        const int y = entry[1] - '0', d = entry[2] - '0';
        if (p.size() == 5) {
            out.group(p[0] == 'a' ? Group::a : Group::b).transitions.at(y, d) = v;
        } else {
            out.a.transitions.at(y, d) = v;
            out.b.transitions.at(y, d) = v;
        }
    }
    return out;
}

std::vector<std::vector<double>> sweep_points(const std::vector<SweepAxis>& axes) {
    std::vector<std::vector<double>> out{{}};
    for (const SweepAxis& ax : axes) {
        std::vector<std::vector<double>> next;
        for (const auto& prefix : out)
            for (std::size_t k = 0; k < ax.values.size(); ++k) {
                next.push_back(prefix);
                next.back().push_back(ax.values[k]);
                for (const SweepAxis& l : ax.linked) next.back().push_back(l.values[k]);
            }
        out = std::move(next);
    }
    return out;
}

}  // namespace fairdyn::cli
