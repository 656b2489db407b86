#include "frnn/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <string_view>

#include "frnn/errors.hpp"

namespace frnn {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_double(const std::string& key, std::string_view value) {
    double out = 0;
    const char* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
        throw ParseError("config key '" + key + "': expected a number, got '" +
                         std::string(value) + "'");
    }
    return out;
}

long long parse_integer(const std::string& key, std::string_view value) {
    long long out = 0;
    const char* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end) {
        throw ParseError("config key '" + key + "': expected an integer, got '" +
                         std::string(value) + "'");
    }
    return out;
}

std::uint64_t parse_seed(const std::string& key, std::string_view value) {
    std::uint64_t out = 0;
    const char* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end) {
        throw ParseError("config key '" + key + "': expected an unsigned integer, got '" +
                         std::string(value) + "'");
    }
    return out;
}

int parse_positive_int(const std::string& key, std::string_view value, long long minimum) {
    const long long out = parse_integer(key, value);
    if (out < minimum || out > std::numeric_limits<int>::max()) {
        throw ParseError("config key '" + key + "': value out of range");
    }
    return static_cast<int>(out);
}

} // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> config;
    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        std::string_view line = nl == std::string::npos
                                    ? std::string_view(text).substr(start)
                                    : std::string_view(text).substr(start, nl - start);
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (!line.empty()) {
            const std::size_t eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw ParseError("config line " + std::to_string(line_no) +
                                 ": expected 'key = value'");
            }
            std::string key(trim(line.substr(0, eq)));
            std::string value(trim(line.substr(eq + 1)));
            if (key.empty()) {
                throw ParseError("config line " + std::to_string(line_no) + ": empty key");
            }
            if (config.count(key)) {
                throw ParseError("config line " + std::to_string(line_no) + ": duplicate key '" +
                                 key + "'");
            }
            config.emplace(std::move(key), std::move(value));
        }
        if (nl == std::string::npos) break;
        start = nl + 1;
    }
    return config;
}

void apply_config(const std::map<std::string, std::string>& config, GradientDescentConfig& gd,
                  ComboConfig& combo) {
    for (const auto& [key, value] : config) {
        if (key == "gd.initial_gamma") {
            gd.initial_gamma = parse_double(key, value);
        } else if (key == "gd.batch_size") {
            gd.batch_size = parse_positive_int(key, value, 1);
        } else if (key == "gd.learning_rate") {
            gd.learning_rate = parse_double(key, value);
        } else if (key == "gd.max_iterations") {
            gd.max_iterations = parse_positive_int(key, value, 1);
        } else if (key == "gd.precision") {
            gd.precision = parse_double(key, value);
        } else if (key == "gd.seed") {
            gd.seed = parse_seed(key, value);
        } else if (key == "combo.folds") {
            combo.inner_folds = parse_positive_int(key, value, 2);
        } else if (key == "combo.seed") {
            combo.seed = parse_seed(key, value);
        } else if (key == "combo.candidates") {
            combo.candidates.clear();
            std::string_view rest = value;
            while (true) {
                const std::size_t comma = rest.find(',');
                std::string token(trim(rest.substr(0, comma)));
                if (token.empty()) {
                    throw ParseError("config key 'combo.candidates': empty relation name");
                }
                combo.candidates.push_back(std::move(token));
                if (comma == std::string_view::npos) break;
                rest = rest.substr(comma + 1);
            }
        } else {
            throw ParseError("unknown config key '" + key + "'");
        }
    }
}

} // namespace frnn
