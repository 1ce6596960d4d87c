#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hj/network.hpp"

namespace hj {

// Parameter file format: magic "HJNN", u32 version, u32 length-prefixed UTF-8
// JSON architecture descriptor, then the parameters as little-endian f64 in
// index-map order.
void save_theta(const std::string& path, const Network& net, Span theta);

std::pair<Network, std::vector<double>> load_theta(const std::string& path);

std::string describe_architecture(const Network& net);
Network architecture_from_json(const std::string& json_text);

}  // namespace hj
