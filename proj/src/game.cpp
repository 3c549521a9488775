#include "cmg/game.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cmg/errors.hpp"

namespace cmg {

std::string role_name(Role r) {
    switch (r) {
        case Role::OsFlag: return "os-flag";
        case Role::OsVersion: return "os-version";
        case Role::AppFlag: return "app-flag";
        case Role::AppVersion: return "app-version";
        case Role::Port: return "port";
        default: return "none";
    }
}

Role role_from_name(const std::string& name) {
    if (name == "os-flag") return Role::OsFlag;
    if (name == "os-version") return Role::OsVersion;
    if (name == "app-flag") return Role::AppFlag;
    if (name == "app-version") return Role::AppVersion;
    if (name == "port") return Role::Port;
    if (name == "none" || name.empty()) return Role::None;
    throw SpecError("unknown attribute role: " + name);
}

void AttributeSchema::validate() const {
    if (n <= 0) throw SchemaError("schema.n must be positive");
    if (static_cast<int>(domains.size()) != n)
        throw SchemaError("schema.domains must have n entries");
    if (!roles.empty() && static_cast<int>(roles.size()) != n)
        throw SchemaError("schema.roles must be empty or have n entries");
    for (int i = 0; i < n; ++i) {
        if (domains[i].empty())
            throw SchemaError("attribute " + std::to_string(i) + " has an empty domain");
        for (int v : domains[i]) {
            if (v == 0)
                throw SchemaError("attribute " + std::to_string(i) +
                                  " contains 0 (reserved for masked entries)");
            if (v < -1 || v > V)
                throw SchemaError("attribute " + std::to_string(i) + " value " +
                                  std::to_string(v) + " outside [-1, V]");
        }
    }
}

std::vector<int> AttributeSchema::role_indices(Role r) const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(roles.size()); ++i)
        if (roles[i] == r) out.push_back(i);
    return out;
}

void GameSpec::validate() const {
    schema.validate();
    if (m < 1) throw SchemaError("device count m must be >= 1");
    for (const auto& e : exploits) {
        for (const auto& [idx, allowed] : e.required) {
            if (idx < 0 || idx >= schema.n)
                throw SchemaError("exploit attribute index " + std::to_string(idx) +
                                  " out of range");
            if (allowed.empty())
                throw SchemaError("exploit allowed set for attribute " + std::to_string(idx) +
                                  " is empty");
            for (int v : allowed) {
                const auto& dom = schema.domains[idx];
                if (std::find(dom.begin(), dom.end(), v) == dom.end())
                    throw SchemaError("exploit requires value " + std::to_string(v) +
                                      " outside the domain of attribute " + std::to_string(idx));
            }
        }
    }
    if (static_cast<int>(cost.per_attribute.size()) != schema.n)
        throw SchemaError("cost.per_attribute must have n entries");
    for (double c : cost.per_attribute)
        if (c < 0.0) throw SchemaError("mask costs must be nonnegative");
    if (prior.kind == PriorKind::ExplicitTable) {
        if (prior.table.empty()) throw SpecError("explicit-table prior is empty");
        double total = 0.0;
        for (const auto& [x, p] : prior.table) {
            if (static_cast<int>(x.size()) != joint_len())
                throw SpecError("prior table configuration length != m*n");
            if (p < 0.0) throw SpecError("prior table probability is negative");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw SpecError("prior table probabilities sum to " + std::to_string(total));
    }
}

double GameSpec::device_value(const int* x) const {
    switch (value.kind) {
        case ValueKind::HalfSumPlusOne: {
            double s = 0.0;
            for (int i = 0; i < schema.n; ++i) s += x[i] + 1;
            return 0.5 * s;
        }
        case ValueKind::OnePlusApps: {
            const auto flags = schema.role_indices(Role::AppFlag);
            int installed = 0;
            if (!flags.empty()) {
                for (int i : flags) installed += (x[i] == 1);
            } else {
                for (int i : schema.role_indices(Role::AppVersion)) installed += (x[i] != -1);
            }
            return 1.0 + installed;
        }
        case ValueKind::ExplicitTable: {
            Config key(x, x + schema.n);
            auto it = value.table.find(key);
            if (it == value.table.end())
                throw DomainError("value table has no entry for a support configuration");
            return it->second;
        }
    }
    throw DomainError("unknown value kind");
}

double GameSpec::exploit_value(const Config& joint, const Exploit& e) const {
    double total = 0.0;
    for (int k = 0; k < m; ++k) {
        const int* x = joint.data() + k * schema.n;
        bool ok = true;
        for (const auto& [idx, allowed] : e.required) {
            if (std::find(allowed.begin(), allowed.end(), x[idx]) == allowed.end()) {
                ok = false;
                break;
            }
        }
        if (ok) total += device_value(x);
    }
    return total;
}

std::vector<double> GameSpec::delta_vector(const Config& joint) const {
    std::vector<double> d(exploits.size());
    for (size_t e = 0; e < exploits.size(); ++e) d[e] = exploit_value(joint, exploits[e]);
    return d;
}

double GameSpec::mask_cost(const Mask& joint_mask) const {
    double total = 0.0;
    for (int i = 0; i < static_cast<int>(joint_mask.size()); ++i)
        total += cost.per_attribute[i % schema.n] * (1 - joint_mask[i]);
    return total;
}

double GameSpec::mask_cost_continuous(const double* y, int len) const {
    double total = 0.0;
    for (int i = 0; i < len; ++i) total += cost.per_attribute[i % schema.n] * (1.0 - y[i]);
    return total;
}

Obs observe(const Config& x, const Mask& y) {
    if (x.size() != y.size()) throw SchemaError("observe: configuration/mask length mismatch");
    Obs out(x.size());
    for (size_t i = 0; i < x.size(); ++i) out[i] = x[i] * y[i];
    return out;
}

Mask mask_of(const Obs& obs) {
    Mask y(obs.size());
    for (size_t i = 0; i < obs.size(); ++i) y[i] = obs[i] != 0;
    return y;
}

bool matches(const Config& x, const Exploit& e) {
    for (const auto& [idx, allowed] : e.required) {
        if (idx < 0 || idx >= static_cast<int>(x.size()))
            throw SchemaError("exploit attribute index out of range");
        if (std::find(allowed.begin(), allowed.end(), x[idx]) == allowed.end()) return false;
    }
    return true;
}

std::vector<std::pair<Config, double>> enumerate_support(const GameSpec& game) {
    if (game.prior.kind == PriorKind::ExplicitTable) return game.prior.table;
    if (game.prior.kind != PriorKind::UniformBinary)
        throw CapacityError(
            "structured priors cannot be enumerated exactly; use the GAM solver");

    const int len = game.joint_len();
    double log_states = 0.0;
    for (int i = 0; i < len; ++i)
        log_states += std::log2(double(game.schema.domains[i % game.schema.n].size()));
    if (log_states > 20.0 + 1e-9)
        throw CapacityError("joint support exceeds the 2^20 enumeration cap; use the GAM solver");

    std::vector<std::pair<Config, double>> out;
    uint64_t count = 1;
    for (int i = 0; i < len; ++i) count *= game.schema.domains[i % game.schema.n].size();
    const double p = 1.0 / static_cast<double>(count);

    Config x(len);
    std::vector<size_t> pos(len, 0);
    while (true) {
        for (int i = 0; i < len; ++i) x[i] = game.schema.domains[i % game.schema.n][pos[i]];
        out.emplace_back(x, p);
        int i = len - 1;
        while (i >= 0) {
            if (++pos[i] < game.schema.domains[i % game.schema.n].size()) break;
            pos[i] = 0;
            --i;
        }
        if (i < 0) break;
    }
    return out;
}

Mask mask_from_index(uint64_t idx, int len) {
    Mask y(len);
    for (int i = 0; i < len; ++i) y[i] = (idx >> i) & 1ULL;
    return y;
}

uint64_t mask_index(const Mask& y) {
    uint64_t idx = 0;
    for (size_t i = 0; i < y.size(); ++i)
        if (y[i]) idx |= 1ULL << i;
    return idx;
}

void DefenderTable::validate() const {
    for (const auto& row : q) {
        double total = 0.0;
        for (double p : row) {
            if (p < -1e-9) throw DomainError("defender table has a negative probability");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-7)
            throw DomainError("defender table row sums to " + std::to_string(total));
    }
}

std::unordered_map<Config, double, VecHash> posterior(const DefenderTable& q,
                                                      const GameSpec& game, const Obs& obs) {
    if (static_cast<int>(obs.size()) != game.joint_len())
        throw SchemaError("posterior: observation length != m*n");
    const uint64_t yi = mask_index(mask_of(obs));

    std::unordered_map<Config, double, VecHash> b;
    double total = 0.0;
    for (size_t i = 0; i < q.support.size(); ++i) {
        const Config& x = q.support[i];
        bool compatible = true;
        for (size_t j = 0; j < obs.size(); ++j) {
            if (obs[j] != 0 && x[j] != obs[j]) {
                compatible = false;
                break;
            }
        }
        if (!compatible) continue;
        const double w = q.prior[i] * q.q[i][yi];
        if (w > 0.0) {
            b[x] += w;
            total += w;
        }
    }
    if (total <= 0.0) {
        std::ostringstream ss;
        ss << "observation [";
        for (size_t j = 0; j < obs.size(); ++j) ss << (j ? "," : "") << obs[j];
        ss << "] has zero probability under the given strategy";
        throw DomainError(ss.str());
    }
    for (auto& [x, w] : b) w /= total;
    return b;
}

namespace {

void sample_device_structured(const AttributeSchema& schema, Rng& rng, int* x) {
    const auto os_flags = schema.role_indices(Role::OsFlag);
    const auto os_versions = schema.role_indices(Role::OsVersion);
    const auto app_flags = schema.role_indices(Role::AppFlag);
    const auto app_versions = schema.role_indices(Role::AppVersion);
    const auto ports = schema.role_indices(Role::Port);

    if (!os_flags.empty()) {
        const int installed = rng.uniform_int(0, static_cast<int>(os_flags.size()) - 1);
        if (os_versions.size() == os_flags.size()) {
            for (size_t i = 0; i < os_flags.size(); ++i) {
                x[os_flags[i]] = (static_cast<int>(i) == installed) ? 1 : -1;
                x[os_versions[i]] =
                    (static_cast<int>(i) == installed) ? rng.uniform_int(1, schema.V) : -1;
            }
        } else {
            // Compact encoding: the OS slot itself carries the version.
            for (size_t i = 0; i < os_flags.size(); ++i)
                x[os_flags[i]] =
                    (static_cast<int>(i) == installed) ? rng.uniform_int(1, schema.V) : -1;
        }
    }

    if (!app_flags.empty()) {
        for (size_t i = 0; i < app_flags.size(); ++i) {
            const bool installed = rng.coin();
            x[app_flags[i]] = installed ? 1 : -1;
            if (i < app_versions.size())
                x[app_versions[i]] = installed ? rng.uniform_int(1, schema.V) : -1;
        }
    } else {
        for (int idx : app_versions) x[idx] = rng.coin() ? rng.uniform_int(1, schema.V) : -1;
    }

    if (!ports.empty()) {
        bool any_open = false;
        while (!any_open) {
            for (int idx : ports) {
                const bool open = rng.coin();
                x[idx] = open ? -1 : 1;
                any_open = any_open || open;
            }
        }
    }

    // Untagged attributes fall back to a uniform domain draw.
    for (int i = 0; i < schema.n; ++i) {
        if (schema.roles.empty() || schema.roles[i] == Role::None) {
            const auto& dom = schema.domains[i];
            x[i] = dom[rng.uniform_int(0, static_cast<int>(dom.size()) - 1)];
        }
    }
}

}  // namespace

Config sample_joint(const GameSpec& game, Rng& rng) {
    const int len = game.joint_len();
    Config x(len);
    switch (game.prior.kind) {
        case PriorKind::ExplicitTable: {
            double u = rng.uniform01();
            for (const auto& [cfg, p] : game.prior.table) {
                u -= p;
                if (u <= 0.0) return cfg;
            }
            return game.prior.table.back().first;
        }
        case PriorKind::UniformBinary: {
            for (int i = 0; i < len; ++i) {
                const auto& dom = game.schema.domains[i % game.schema.n];
                x[i] = dom[rng.uniform_int(0, static_cast<int>(dom.size()) - 1)];
            }
            return x;
        }
        case PriorKind::Structured: {
            for (int k = 0; k < game.m; ++k)
                sample_device_structured(game.schema, rng, x.data() + k * game.schema.n);
            return x;
        }
    }
    throw DomainError("unknown prior kind");
}

GameSpec generate_structured_instance(int n, int m, int num_exploits, int V, uint64_t seed,
                                      double mask_cost_c) {
    const int num_ports = (n + 1) / 2;
    const int middle = n - 6 - num_ports;
    if (middle < 0 || middle % 2 != 0)
        throw ConfigError("structured layout infeasible for n=" + std::to_string(n) +
                          ": need 3 OS flags, 3 OS versions, whole app flag/version pairs and " +
                          std::to_string(num_ports) + " ports");
    const int num_apps = middle / 2;

    GameSpec game;
    game.m = m;
    game.schema.n = n;
    game.schema.V = V;
    game.schema.domains.resize(n);
    game.schema.roles.assign(n, Role::None);

    std::vector<int> version_domain = {-1};
    for (int v = 1; v <= V; ++v) version_domain.push_back(v);

    for (int i = 0; i < 3; ++i) {
        game.schema.roles[i] = Role::OsFlag;
        game.schema.domains[i] = {-1, 1};
        game.schema.roles[3 + i] = Role::OsVersion;
        game.schema.domains[3 + i] = version_domain;
    }
    std::vector<int> app_flag_idx, app_version_idx, port_idx;
    for (int a = 0; a < num_apps; ++a) {
        const int fi = 6 + 2 * a, vi = 6 + 2 * a + 1;
        game.schema.roles[fi] = Role::AppFlag;
        game.schema.domains[fi] = {-1, 1};
        game.schema.roles[vi] = Role::AppVersion;
        game.schema.domains[vi] = version_domain;
        app_flag_idx.push_back(fi);
        app_version_idx.push_back(vi);
    }
    for (int i = n - num_ports; i < n; ++i) {
        game.schema.roles[i] = Role::Port;
        game.schema.domains[i] = {-1, 1};
        port_idx.push_back(i);
    }

    game.prior.kind = PriorKind::Structured;
    game.prior.seed = seed;
    game.value.kind = ValueKind::OnePlusApps;
    game.cost.per_attribute.assign(n, mask_cost_c);

    Rng rng(seed);
    auto version_range = [&]() {
        // Uniform over all contiguous [a, b] with 1 <= a <= b <= V.
        std::vector<std::pair<int, int>> ranges;
        for (int a = 1; a <= V; ++a)
            for (int b = a; b <= V; ++b) ranges.emplace_back(a, b);
        return ranges[rng.uniform_int(0, static_cast<int>(ranges.size()) - 1)];
    };
    auto range_values = [](std::pair<int, int> r) {
        std::vector<int> vs;
        for (int v = r.first; v <= r.second; ++v) vs.push_back(v);
        return vs;
    };

    for (int e = 0; e < num_exploits; ++e) {
        Exploit ex;
        const int os = rng.uniform_int(0, 2);
        ex.required[os] = {1};
        ex.required[3 + os] = range_values(version_range());
        if (num_apps > 0 && rng.coin()) {
            const int app = rng.uniform_int(0, num_apps - 1);
            ex.required[app_flag_idx[app]] = {1};
            ex.required[app_version_idx[app]] = range_values(version_range());
        }
        const int port = port_idx[rng.uniform_int(0, num_ports - 1)];
        ex.required[port] = {-1};
        game.exploits.push_back(std::move(ex));
    }

    game.validate();
    return game;
}

}  // namespace cmg
