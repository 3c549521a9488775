#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cmg {

// A device configuration (length n) or a joint configuration over m devices
// (length m*n, device k occupying entries [k*n, (k+1)*n)).
using Config = std::vector<int>;

// Binary mask; 1 = attribute observable, 0 = suppressed.
using Mask = std::vector<uint8_t>;

// Observation x~ = x (.) y; masked entries are 0 (0 is excluded from every
// attribute domain, so the mask is recoverable from the observation).
using Obs = std::vector<int>;

// Optional per-attribute tags used by structured instances.
enum class Role { None, OsFlag, OsVersion, AppFlag, AppVersion, Port };

std::string role_name(Role r);
Role role_from_name(const std::string& name);

struct AttributeSchema {
    int n = 0;
    int V = 1;
    std::vector<std::vector<int>> domains;  // size n; values in [-1, V], never 0
    std::vector<Role> roles;                // empty or size n

    void validate() const;
    bool has_roles() const { return !roles.empty(); }
    std::vector<int> role_indices(Role r) const;
};

// Conjunction of per-attribute allowed-value sets; absent index = don't care.
struct Exploit {
    std::map<int, std::vector<int>> required;
};

enum class PriorKind { ExplicitTable, UniformBinary, Structured };

struct Prior {
    PriorKind kind = PriorKind::UniformBinary;
    // Explicit table over joint configurations (length m*n), probabilities
    // nonnegative and summing to 1 within 1e-9.
    std::vector<std::pair<Config, double>> table;
    uint64_t seed = 0;  // structured sampling seed
};

enum class ValueKind { HalfSumPlusOne, OnePlusApps, ExplicitTable };

struct ValueFn {
    ValueKind kind = ValueKind::HalfSumPlusOne;
    std::map<Config, double> table;  // per-device configurations, ExplicitTable only
};

// c(y) = sum_i c_i (1 - y_i); additive over devices.
struct CostFn {
    std::vector<double> per_attribute;  // size n, all >= 0
};

struct GameSpec {
    AttributeSchema schema;
    int m = 1;
    Prior prior;
    std::vector<Exploit> exploits;
    ValueFn value;
    CostFn cost;

    void validate() const;

    int joint_len() const { return m * schema.n; }

    // v(x) for a single device configuration starting at x.
    double device_value(const int* x) const;

    // sum_k v(x^k) delta(x^k in X^e) for a joint configuration.
    double exploit_value(const Config& joint, const Exploit& e) const;

    // The exploit_value of every exploit (the per-sample delta vector).
    std::vector<double> delta_vector(const Config& joint) const;

    // c(y) summed over devices for a joint mask.
    double mask_cost(const Mask& joint_mask) const;
    double mask_cost_continuous(const double* y, int len) const;
};

}  // namespace cmg
