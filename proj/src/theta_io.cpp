#include "hj/theta_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace hj {

static_assert(std::endian::native == std::endian::little,
              "theta files are little-endian; big-endian hosts are not supported");

namespace {

constexpr char kMagic[4] = {'H', 'J', 'N', 'N'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

}  // namespace

std::string describe_architecture(const Network& net) {
    nlohmann::json j;
    if (const auto* m = net.mlp()) {
        j["type"] = "mlp";
        j["input_dim"] = m->input_dim;
        j["hidden"] = m->hidden;
    } else {
        const auto* p = net.periodic();
        j["type"] = "periodic";
        j["spatial_dim"] = p->spatial_dim;
        j["hidden"] = p->hidden;
        auto groups = nlohmann::json::array();
        for (const auto& g : p->groups) {
            groups.push_back({{"angle_index", g.angle_index}, {"max_frequency", g.max_frequency}});
        }
        j["groups"] = groups;
    }
    return j.dump();
}

Network architecture_from_json(const std::string& json_text) {
    const auto j = nlohmann::json::parse(json_text);
    const std::string type = j.at("type").get<std::string>();
    if (type == "mlp") {
        MlpArchitecture a;
        a.input_dim = j.at("input_dim").get<int>();
        a.hidden = j.at("hidden").get<std::vector<int>>();
        return Network(a);
    }
    if (type == "periodic") {
        PeriodicArchitecture a;
        a.spatial_dim = j.at("spatial_dim").get<int>();
        a.hidden = j.at("hidden").get<std::vector<int>>();
        for (const auto& g : j.at("groups")) {
            a.groups.push_back({g.at("angle_index").get<int>(), g.at("max_frequency").get<int>()});
        }
        return Network(a);
    }
    throw std::invalid_argument("unknown architecture type: " + type);
}

void save_theta(const std::string& path, const Network& net, Span theta) {
    if (theta.size() != net.param_count()) {
        throw std::invalid_argument("save_theta: parameter count mismatch");
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_theta: cannot open " + path);
    os.write(kMagic, 4);
    write_u32(os, kVersion);
    const std::string desc = describe_architecture(net);
    write_u32(os, static_cast<std::uint32_t>(desc.size()));
    os.write(desc.data(), static_cast<std::streamsize>(desc.size()));
    os.write(reinterpret_cast<const char*>(theta.data()),
             static_cast<std::streamsize>(theta.size() * sizeof(double)));
    if (!os) throw std::runtime_error("save_theta: write failed for " + path);
}

std::pair<Network, std::vector<double>> load_theta(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_theta: cannot open " + path);
    char magic[4] = {};
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0) {
        throw std::runtime_error("load_theta: bad magic in " + path);
    }
    const std::uint32_t version = read_u32(is);
    if (version != kVersion) throw std::runtime_error("load_theta: unsupported version");
    const std::uint32_t len = read_u32(is);
    std::string desc(len, '\0');
    is.read(desc.data(), len);
    if (!is) throw std::runtime_error("load_theta: truncated descriptor");
    Network net = architecture_from_json(desc);
    std::vector<double> theta(net.param_count());
    is.read(reinterpret_cast<char*>(theta.data()),
            static_cast<std::streamsize>(theta.size() * sizeof(double)));
    if (!is) throw std::runtime_error("load_theta: truncated parameters");
    return {std::move(net), std::move(theta)};
}

}  // namespace hj
