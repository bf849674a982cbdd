#include "bullets/io.hpp"

#include <fstream>
#include <sstream>

#include "bullets/errors.hpp"

namespace bullets {

Json rat_json(const Rat& value) { return value.str(); }

Rat rat_from_json(const Json& value, const std::string& field) {
    if (value.is_string()) {
        try {
            return Rat::parse(value.get<std::string>());
        } catch (const Invalid& e) {
            throw Invalid(field + ": " + e.what());
        }
    }
    if (value.is_number_integer()) return Rat(value.get<long long>());
    throw Invalid(field + ": expected a rational string or an integer");
}

namespace {

std::vector<Rat> rat_array(const Json& file, const std::string& field) {
    if (!file.contains(field)) throw Invalid(field + ": missing field");
    const Json& arr = file.at(field);
    if (!arr.is_array()) throw Invalid(field + ": expected an array");
    std::vector<Rat> out;
    out.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i)
        out.push_back(rat_from_json(arr[i], field + "[" + std::to_string(i + 1) + "]"));
    return out;
}

Rat rat_field(const Json& file, const std::string& field) {
    if (!file.contains(field)) throw Invalid(field + ": missing field");
    return rat_from_json(file.at(field), field);
}

Json rat_array_json(const std::vector<Rat>& values) {
    Json arr = Json::array();
    for (const Rat& v : values) arr.push_back(rat_json(v));
    return arr;
}

Json index_array_json(const std::vector<int>& zero_based) {
    Json arr = Json::array();
    for (const int i : zero_based) arr.push_back(i + 1);
    return arr;
}

} // namespace

Parameter parameter_from_json(const Json& file) {
    if (!file.is_object()) throw Invalid("parameter file: expected a JSON object");
    Parameter p;
    p.speeds = rat_array(file, "speeds");
    p.delays = rat_array(file, "delays");
    p.validate();
    return p;
}

Json parameter_json(const Parameter& p) {
    Json out = Json::object();
    out["speeds"] = rat_array_json(p.speeds);
    out["delays"] = rat_array_json(p.delays);
    return out;
}

namespace {

CrossingFilter filter_from_name(const std::string& name) {
    if (name == "zero") return CrossingFilter::Zero;
    if (name == "nonneg") return CrossingFilter::AllNonneg;
    if (name == "positive") return CrossingFilter::Positive;
    throw Invalid("filter: expected one of zero|nonneg|positive, got \"" + name + "\"");
}

std::string filter_name(CrossingFilter f) {
    switch (f) {
    case CrossingFilter::Zero: return "zero";
    case CrossingFilter::AllNonneg: return "nonneg";
    case CrossingFilter::Positive: return "positive";
    }
    throw Invalid("filter: unknown enumerator");
}

} // namespace

ConstrainedParameter constrained_from_json(const Json& file) {
    if (!file.is_object()) throw Invalid("parameter file: expected a JSON object");
    ConstrainedParameter cp;
    cp.free_speeds = rat_array(file, "free_speeds");
    cp.v_min = rat_field(file, "v_min");
    cp.v_r = rat_field(file, "v_r");
    cp.free_delays = rat_array(file, "free_delays");
    cp.delta_star = rat_field(file, "delta_star");
    cp.s = file.contains("s") ? rat_from_json(file.at("s"), "s") : intersection_height(cp);
    if (file.contains("filter")) {
        if (!file.at("filter").is_string()) throw Invalid("filter: expected a string");
        cp.filter = filter_from_name(file.at("filter").get<std::string>());
    }
    cp.validate();
    return cp;
}

Json constrained_json(const ConstrainedParameter& cp) {
    Json out = Json::object();
    out["free_speeds"] = rat_array_json(cp.free_speeds);
    out["v_min"] = rat_json(cp.v_min);
    out["v_r"] = rat_json(cp.v_r);
    out["free_delays"] = rat_array_json(cp.free_delays);
    out["delta_star"] = rat_json(cp.delta_star);
    out["s"] = rat_json(cp.s);
    out["filter"] = filter_name(cp.filter);
    return out;
}

ImpetusProblem impetus_from_json(const Json& file) {
    if (!file.is_object()) throw Invalid("parameter file: expected a JSON object");
    ImpetusProblem ip;
    ip.impetuses = rat_array(file, "speeds");
    ip.delays = rat_array(file, "delays");
    return ip;
}

Json diagram_json(const Diagram& d) {
    Json bullets = Json::array();
    for (int i = 0; i < d.n(); ++i) {
        const Diagram::Bullet& b = d.bullets[static_cast<std::size_t>(i)];
        Json entry = Json::object();
        entry["id"] = i + 1;
        entry["birth"] = rat_json(b.birth);
        entry["speed"] = rat_json(b.speed);
        if (b.death.is_finite()) {
            entry["death"] = rat_json(b.death.value());
            entry["death_position"] = rat_json(b.death_position);
            entry["partner"] = b.partner + 1;
        } else {
            entry["death"] = "inf";
            entry["partner"] = nullptr;
        }
        bullets.push_back(std::move(entry));
    }
    Json out = Json::object();
    out["n"] = d.n();
    out["bullets"] = std::move(bullets);
    out["survivors"] = index_array_json(d.survivors);
    return out;
}

Json law_json(const SurvivorDistribution& q) {
    Json out = Json::object();
    for (const auto& [k, mass] : q.mass) out[std::to_string(k)] = rat_json(mass);
    return out;
}

Json count_table_json(const CountTable& t) {
    Json counts = Json::object();
    for (const auto& [k, c] : t.count) counts[std::to_string(k)] = std::to_string(c);
    Json out = Json::object();
    out["total"] = std::to_string(t.total);
    out["count"] = std::move(counts);
    return out;
}

Json critical_pattern_json(const CriticalPattern& cp) {
    Json out = Json::object();
    out["v_m"] = rat_json(cp.v_m);
    out["v_l"] = rat_json(cp.v_l);
    out["v_r"] = rat_json(cp.v_r);
    out["d_l"] = rat_json(cp.d_l);
    out["d_r"] = rat_json(cp.d_r);
    out["left_delay_indices"] = index_array_json(cp.left_indices);
    out["right_delay_indices"] = index_array_json(cp.right_indices);
    out["triple_height"] = rat_json(cp.triple_height);
    out["minimal"] = cp.minimal;
    return out;
}

Json RunManifest::json() const {
    Json flag_obj = Json::object();
    for (const auto& [key, value] : flags) flag_obj[key] = value;
    Json out = Json::object();
    out["subcommand"] = subcommand;
    out["flags"] = std::move(flag_obj);
    out["seed"] = seed;
    out["parameter_hash"] = parameter_hash;
    out["version"] = version;
    out["duration_seconds"] = duration_seconds;
    return out;
}

std::string content_hash(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream hex;
    hex << std::hex;
    for (int shift = 60; shift >= 0; shift -= 4) hex << ((h >> shift) & 0xf);
    return hex.str();
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Invalid(path + ": cannot open for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw Invalid(path + ": read failed");
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Invalid(path + ": cannot open for writing");
    out << text;
    if (!out) throw Invalid(path + ": write failed");
}

std::string trajectory_csv(const std::vector<int>& series) {
    std::string out = "j,survivors\n";
    for (std::size_t j = 0; j < series.size(); ++j) {
        out += std::to_string(j + 1);
        out += ',';
        out += std::to_string(series[j]);
        out += '\n';
    }
    return out;
}

} // namespace bullets
