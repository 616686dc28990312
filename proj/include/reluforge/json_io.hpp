#pragma once

#include <string>

#include "network.hpp"

namespace reluforge {

std::string network_to_json(const Network& net);
Network network_from_json(const std::string& text);

void save_network(const Network& net, const std::string& path);
Network load_network(const std::string& path);

} // namespace reluforge
