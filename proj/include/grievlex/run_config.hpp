#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grievlex/bayes_factor.hpp"
#include "grievlex/csv.hpp"
#include "grievlex/version.hpp"

namespace grievlex {

// Resolved run knobs. Every output file embeds these so results are
// self-describing; paths and thread counts are excluded on purpose, since
// reruns in other directories or at other thread counts must produce
// byte-identical files.
struct RunConfig {
    std::uint64_t seed = 42;
    std::size_t iterations = 100;
    std::size_t chunk_size = 100;
    double threshold = 7.0;
    double bf_scale = kDefaultBfScale;
    double split = 0.8;
    unsigned threads = 1;
    std::string out_dir = ".";
};

inline std::vector<std::string> config_comments(const RunConfig& config,
                                                const std::string& command,
                                                const std::string& extra = {}) {
    std::vector<std::string> lines;
    lines.push_back("grievlex " + std::string(kVersion) + " " + command);
    std::string knobs = "seed=" + std::to_string(config.seed) +
                        " iterations=" + std::to_string(config.iterations) +
                        " chunk-size=" + std::to_string(config.chunk_size) +
                        " threshold=" + format_short(config.threshold) +
                        " bf-scale=" + format_general(config.bf_scale) +
                        " split=" + format_short(config.split);
    if (!extra.empty()) knobs += " " + extra;
    lines.push_back(knobs);
    return lines;
}

} // namespace grievlex
