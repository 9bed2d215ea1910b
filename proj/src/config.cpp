#include "risklab/config.hpp"

#include "risklab/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace risklab {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw Error(what + ": not a number: '" + text + "'");
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep))
        out.push_back(trim(item));
    return out;
}

std::pair<std::string, std::string> head_tail(const std::string& recipe) {
    const auto colon = recipe.find(':');
    if (colon == std::string::npos)
        return {trim(recipe), ""};
    return {trim(recipe.substr(0, colon)), trim(recipe.substr(colon + 1))};
}

} // namespace

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<double> parse_double_list(const std::string& text, char sep) {
    std::vector<double> out;
    for (const auto& item : split(text, sep))
        if (!item.empty())
            out.push_back(to_double(item, "list"));
    return out;
}

Config Config::parse(std::string_view text, const std::string& source) {
    Config cfg;
    cfg.source_ = source;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty())
            continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw Error(source + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty())
            throw Error(source + ":" + std::to_string(lineno) + ": empty key");
        if (key.rfind("agent.", 0) == 0) {
            const std::string field = key.substr(6);
            if (field == "preference")
                cfg.agents_.push_back({{}, lineno});
            if (cfg.agents_.empty())
                throw Error(source + ":" + std::to_string(lineno) + ": agent key before agent.preference");
            auto& fields = cfg.agents_.back().fields;
            if (fields.count(field))
                throw Error(source + ":" + std::to_string(lineno) + ": duplicate key " + key + " in agent block");
            fields[field] = value;
            continue;
        }
        if (cfg.values_.count(key))
            throw Error(source + ":" + std::to_string(lineno) + ": duplicate key " + key);
        cfg.values_[key] = value;
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open config " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str(), path);
}

std::string Config::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end())
        throw Error("config: missing key " + key);
    return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const { return to_double(get(key), key); }

double Config::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key) const {
    const std::string t = get(key);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw Error(key + ": not a nonnegative integer: '" + t + "'");
    return v;
}

std::uint64_t Config::get_u64_or(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? get_u64(key) : fallback;
}

std::vector<int> Config::get_int_list(const std::string& key) const {
    std::vector<int> out;
    for (double v : parse_double_list(get(key))) {
        if (v != std::floor(v))
            throw Error(key + ": expected integers");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

std::vector<double> Config::get_double_list(const std::string& key) const { return parse_double_list(get(key)); }

void Config::check_known(const std::set<std::string>& top, const std::set<std::string>& agent) const {
    for (const auto& [k, v] : values_)
        if (!top.count(k))
            throw Error("config: key '" + k + "' is not used by experiment '" + get_or("experiment", "?") + "'");
    for (const auto& a : agents_)
        for (const auto& [k, v] : a.fields)
            if (!agent.count(k))
                throw Error("config: agent key 'agent." + k + "' (line " + std::to_string(a.line) +
                            ") is not recognized");
}

std::string Config::canonical() const {
    std::ostringstream out;
    for (const auto& [k, v] : values_)
        out << k << '=' << v << '\n';
    for (const auto& a : agents_) {
        out << "[agent]\n";
        for (const auto& [k, v] : a.fields)
            out << "agent." << k << '=' << v << '\n';
    }
    return out.str();
}

Vec vector_recipe(const std::string& recipe, int d, const SeedSpec& seed, bool normalize) {
    require(d >= 1, "vector recipe: dimension must be >= 1");
    const auto [kind, args] = head_tail(recipe);
    Vec v(d);
    if (kind == "uniform") {
        v.setConstant(1.0 / d);
    } else if (kind == "const") {
        v.setConstant(to_double(args, recipe));
    } else if (kind == "head") {
        const auto parts = split(args, ',');
        require(!parts.empty(), "vector recipe: head needs a value");
        const double h = to_double(parts[0], recipe);
        double t = 0.0;
        bool has_tail = false;
        for (std::size_t k = 1; k < parts.size(); ++k) {
            const auto [tk, tv] = head_tail(parts[k]);
            require(tk == "tail", "vector recipe: expected tail:<value> in '" + recipe + "'");
            t = to_double(tv, recipe);
            has_tail = true;
        }
        if (!has_tail) {
            require(normalize && d >= 2, "vector recipe: head without tail is only valid for priors");
            t = (1.0 - h) / (d - 1);
        }
        v.setConstant(t);
        v(0) = h;
    } else if (kind == "alternate") {
        const auto vals = parse_double_list(args);
        require(!vals.empty(), "vector recipe: alternate needs values");
        for (int s = 0; s < d; ++s)
            v(s) = vals[static_cast<std::size_t>(s) % vals.size()];
    } else if (kind == "list") {
        const auto vals = parse_double_list(args);
        if (static_cast<int>(vals.size()) != d)
            throw Error("vector recipe: list has " + std::to_string(vals.size()) + " entries, need " +
                        std::to_string(d));
        for (int s = 0; s < d; ++s)
            v(s) = vals[static_cast<std::size_t>(s)];
    } else if (kind == "random") {
        const auto vals = parse_double_list(args);
        require(vals.size() == 2 && vals[0] <= vals[1], "vector recipe: random:lo,hi");
        CounterRng rng(seed, static_cast<std::uint64_t>(d));
        for (int s = 0; s < d; ++s)
            v(s) = vals[0] + (vals[1] - vals[0]) * rng.uniform();
    } else {
        throw Error("vector recipe: unknown recipe '" + recipe + "'");
    }
    if (normalize) {
        require(v.minCoeff() >= 0.0 && v.sum() > 0.0, "vector recipe: prior must be nonnegative and nonzero");
        v /= v.sum();
    }
    return v;
}

Polytope prior_set_recipe(const std::string& recipe, int d, const SeedSpec& seed) {
    const auto [kind, args] = head_tail(recipe);
    if (kind == "simplex")
        return simplex_polytope(d);
    if (kind == "cap-above" || kind == "cap-below") {
        const auto vals = parse_double_list(args);
        require(vals.size() == 2, "prior set: " + kind + ":k,threshold");
        const int k = static_cast<int>(vals[0]) - 1;
        return kind == "cap-above" ? simplex_cap_above(d, k, vals[1]) : simplex_cap_below(d, k, vals[1]);
    }
    if (kind == "vertices") {
        std::vector<Vec> verts;
        for (const auto& item : split(args, ';')) {
            const auto vals = parse_double_list(item);
            require(static_cast<int>(vals.size()) == d, "prior set: vertex has the wrong dimension");
            verts.push_back(Eigen::Map<const Vec>(vals.data(), d));
        }
        return Polytope::from_vertices(std::move(verts), Ambient::simplex);
    }
    if (kind == "singleton")
        return Polytope::from_vertices({vector_recipe(args, d, seed, true)}, Ambient::simplex);
    throw Error("prior set: unknown recipe '" + recipe + "'");
}

PreferenceSpec preference_from_block(const AgentBlock& block, int d, const SeedSpec& seed) {
    auto field = [&](const std::string& k) {
        const auto it = block.fields.find(k);
        if (it == block.fields.end())
            throw Error("agent block at line " + std::to_string(block.line) + ": missing agent." + k);
        return it->second;
    };
    auto field_or = [&](const std::string& k, const std::string& fb) {
        const auto it = block.fields.find(k);
        return it == block.fields.end() ? fb : it->second;
    };
    const std::string kind = field("preference");
    if (kind == "cobb-douglas")
        return PreferenceSpec::cobb_douglas(vector_recipe(field_or("prior", "uniform"), d, seed, true));
    if (kind == "crra")
        return PreferenceSpec::crra(vector_recipe(field_or("prior", "uniform"), d, seed, true),
                                    to_double(field("gamma"), "agent.gamma"));
    if (kind == "risk-neutral")
        return PreferenceSpec::risk_neutral(vector_recipe(field_or("prior", "uniform"), d, seed, true));
    if (kind == "meu-linear" || kind == "meu-log")
        return PreferenceSpec::meu(prior_set_recipe(field("priors"), d, seed),
                                   kind == "meu-linear" ? Bernoulli::linear : Bernoulli::log);
    throw Error("agent block at line " + std::to_string(block.line) + ": unknown preference '" + kind + "'");
}

EconomySpec build_economy(const Config& config, int d, std::uint64_t master_seed) {
    std::vector<Agent> agents;
    for (std::size_t i = 0; i < config.agents().size(); ++i) {
        const auto& block = config.agents()[i];
        const SeedSpec prior_seed{master_seed, fnv1a("prior/" + std::to_string(i))};
        const SeedSpec endow_seed{master_seed, fnv1a("endowment/" + std::to_string(i))};
        const auto it = block.fields.find("endowment");
        if (it == block.fields.end())
            throw Error("agent block at line " + std::to_string(block.line) + ": missing agent.endowment");
        agents.push_back({preference_from_block(block, d, prior_seed), vector_recipe(it->second, d, endow_seed, false)});
    }
    const std::string space = config.get_or("allocation_space", "nonnegative");
    require(space == "nonnegative" || space == "unrestricted", "allocation_space: nonnegative | unrestricted");
    return EconomySpec(std::move(agents),
                       space == "nonnegative" ? AllocationSpace::nonnegative : AllocationSpace::unrestricted);
}

Allocation build_allocation(const Config& config, const EconomySpec& econ, std::uint64_t master_seed) {
    const std::string kind = config.get_or("allocation", "equilibrium");
    if (kind == "equilibrium")
        return tatonnement_equilibrium(econ).allocation;
    if (kind == "endowment")
        return endowment_allocation(econ);
    if (kind == "planner") {
        Vec w = Vec::Ones(static_cast<Eigen::Index>(econ.size()));
        if (config.has("planner_weights")) {
            const auto vals = config.get_double_list("planner_weights");
            require(vals.size() == econ.size(), "planner_weights: one weight per agent");
            w = Eigen::Map<const Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
        }
        return planner_allocation(econ, w);
    }
    if (kind == "given") {
        Allocation f(static_cast<Eigen::Index>(econ.size()), econ.dimension());
        for (std::size_t i = 0; i < econ.size(); ++i) {
            const auto& block = config.agents()[i];
            const auto it = block.fields.find("allocation");
            if (it == block.fields.end())
                throw Error("allocation=given needs agent.allocation for every agent");
            const SeedSpec seed{master_seed, fnv1a("allocation/" + std::to_string(i))};
            f.row(static_cast<Eigen::Index>(i)) = vector_recipe(it->second, econ.dimension(), seed, false).transpose();
        }
        check_allocation(econ, f);
        return f;
    }
    throw Error("allocation: unknown kind '" + kind + "'");
}

} // namespace risklab
