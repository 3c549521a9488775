#include "cmg/spec_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cmg/errors.hpp"
#include "cmg/game.hpp"

namespace cmg {

using nlohmann::json;

namespace {

std::string prior_kind_name(PriorKind k) {
    switch (k) {
        case PriorKind::ExplicitTable: return "explicit-table";
        case PriorKind::UniformBinary: return "uniform-binary";
        case PriorKind::Structured: return "structured";
    }
    return "?";
}

PriorKind prior_kind_from(const std::string& s) {
    if (s == "explicit-table") return PriorKind::ExplicitTable;
    if (s == "uniform-binary") return PriorKind::UniformBinary;
    if (s == "structured") return PriorKind::Structured;
    throw SpecError("prior.kind: unknown kind '" + s + "'");
}

std::string value_kind_name(ValueKind k) {
    switch (k) {
        case ValueKind::HalfSumPlusOne: return "half-sum-plus-one-scale";
        case ValueKind::OnePlusApps: return "one-plus-apps";
        case ValueKind::ExplicitTable: return "explicit-table";
    }
    return "?";
}

ValueKind value_kind_from(const std::string& s) {
    if (s == "half-sum-plus-one-scale") return ValueKind::HalfSumPlusOne;
    if (s == "one-plus-apps") return ValueKind::OnePlusApps;
    if (s == "explicit-table") return ValueKind::ExplicitTable;
    throw SpecError("value.kind: unknown kind '" + s + "'");
}

const json& require(const json& j, const char* field, const char* where) {
    auto it = j.find(field);
    if (it == j.end())
        throw SpecError(std::string(where) + ": missing required field '" + field + "'");
    return *it;
}

}  // namespace

GameSpec parse_game_spec(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SpecError(std::string("game spec is not valid JSON: ") + e.what());
    }

    GameSpec game;
    try {
        const json& js = require(j, "schema", "spec");
        game.schema.n = require(js, "n", "schema").get<int>();
        game.schema.V = require(js, "V", "schema").get<int>();
        game.schema.domains = require(js, "domains", "schema").get<std::vector<std::vector<int>>>();
        if (js.contains("roles")) {
            for (const auto& r : js["roles"])
                game.schema.roles.push_back(role_from_name(r.get<std::string>()));
        }

        game.m = require(j, "m", "spec").get<int>();

        const json& jp = require(j, "prior", "spec");
        game.prior.kind = prior_kind_from(require(jp, "kind", "prior").get<std::string>());
        if (game.prior.kind == PriorKind::ExplicitTable) {
            for (const auto& row : require(jp, "table", "prior")) {
                if (!row.is_array() || row.size() != 2)
                    throw SpecError("prior.table: each entry must be [[values...], probability]");
                game.prior.table.emplace_back(row[0].get<Config>(), row[1].get<double>());
            }
        }
        if (jp.contains("seed")) game.prior.seed = jp["seed"].get<uint64_t>();

        for (const auto& je : require(j, "exploits", "spec")) {
            Exploit e;
            for (auto it = je.begin(); it != je.end(); ++it) {
                int idx;
                try {
                    idx = std::stoi(it.key());
                } catch (...) {
                    throw SpecError("exploits: attribute key '" + it.key() +
                                    "' is not an integer index");
                }
                e.required[idx] = it.value().get<std::vector<int>>();
            }
            game.exploits.push_back(std::move(e));
        }

        const json& jv = require(j, "value", "spec");
        game.value.kind = value_kind_from(require(jv, "kind", "value").get<std::string>());
        if (game.value.kind == ValueKind::ExplicitTable) {
            for (const auto& row : require(jv, "table", "value")) {
                if (!row.is_array() || row.size() != 2)
                    throw SpecError("value.table: each entry must be [[values...], v]");
                game.value.table[row[0].get<Config>()] = row[1].get<double>();
            }
        }

        const json& jc = require(j, "cost", "spec");
        game.cost.per_attribute = require(jc, "per_attribute", "cost").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw SpecError(std::string("game spec field has the wrong type: ") + e.what());
    }

    game.validate();
    return game;
}

GameSpec load_game_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open game spec file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_game_spec(ss.str());
}

std::string game_spec_to_json(const GameSpec& game) {
    json j;
    j["schema"]["n"] = game.schema.n;
    j["schema"]["V"] = game.schema.V;
    j["schema"]["domains"] = game.schema.domains;
    if (game.schema.has_roles()) {
        std::vector<std::string> roles;
        for (Role r : game.schema.roles) roles.push_back(role_name(r));
        j["schema"]["roles"] = roles;
    }
    j["m"] = game.m;
    j["prior"]["kind"] = prior_kind_name(game.prior.kind);
    if (game.prior.kind == PriorKind::ExplicitTable) {
        json table = json::array();
        for (const auto& [x, p] : game.prior.table) table.push_back(json::array({x, p}));
        j["prior"]["table"] = table;
    }
    if (game.prior.kind == PriorKind::Structured) j["prior"]["seed"] = game.prior.seed;
    j["exploits"] = json::array();
    for (const auto& e : game.exploits) {
        json je = json::object();
        for (const auto& [idx, allowed] : e.required) je[std::to_string(idx)] = allowed;
        j["exploits"].push_back(je);
    }
    j["value"]["kind"] = value_kind_name(game.value.kind);
    if (game.value.kind == ValueKind::ExplicitTable) {
        json table = json::array();
        for (const auto& [x, v] : game.value.table) table.push_back(json::array({x, v}));
        j["value"]["table"] = table;
    }
    j["cost"]["per_attribute"] = game.cost.per_attribute;
    return j.dump(2);
}

void save_game_spec(const GameSpec& game, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SpecError("cannot write game spec file: " + path);
    out << game_spec_to_json(game) << "\n";
}

}  // namespace cmg
