#pragma once

#include "risklab/economy.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace risklab {

struct AgentBlock {
    std::map<std::string, std::string> fields;  // keys without the "agent." prefix
    int line = 0;
};

/// Flat key=value configuration. Lines starting with '#' are comments. Each
/// `agent.preference` line opens a new agent block; later `agent.*` keys
/// belong to it.
class Config {
public:
    static Config parse(std::string_view text, const std::string& source = "<string>");
    static Config load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::string get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    std::uint64_t get_u64(const std::string& key) const;
    std::uint64_t get_u64_or(const std::string& key, std::uint64_t fallback) const;
    std::vector<int> get_int_list(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key) const;

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    const std::vector<AgentBlock>& agents() const { return agents_; }
    void add_agent(AgentBlock block) { agents_.push_back(std::move(block)); }

    /// Throws on any top-level or agent key outside the allowed sets.
    void check_known(const std::set<std::string>& top, const std::set<std::string>& agent) const;

    /// Normalized text (sorted keys, agents in order) used for hashing and manifests.
    std::string canonical() const;

private:
    std::map<std::string, std::string> values_;
    std::vector<AgentBlock> agents_;
    std::string source_;
};

std::uint64_t fnv1a(std::string_view text);

std::vector<double> parse_double_list(const std::string& text, char sep = ',');

/// Builds a d-vector from a recipe:
///   uniform | const:c | head:h[,tail:t] | alternate:a,b[,...] | list:v1,...,vd | random:lo,hi
/// With `normalize` the result is scaled to sum 1 (priors); `head:h` alone
/// then spreads 1 - h evenly over the remaining states.
Vec vector_recipe(const std::string& recipe, int d, const SeedSpec& seed, bool normalize);

/// Prior polytope recipe for max-min agents:
///   simplex | cap-above:k,a | cap-below:k,b | vertices:v1;v2;... | singleton:<vector recipe>
/// Coordinates k are 1-based.
Polytope prior_set_recipe(const std::string& recipe, int d, const SeedSpec& seed);

PreferenceSpec preference_from_block(const AgentBlock& block, int d, const SeedSpec& seed);

/// Economy with d states from the agent blocks of `config`.
EconomySpec build_economy(const Config& config, int d, std::uint64_t master_seed);

/// Allocation named by `allocation=` (equilibrium | planner | endowment | given).
Allocation build_allocation(const Config& config, const EconomySpec& econ, std::uint64_t master_seed);

} // namespace risklab
