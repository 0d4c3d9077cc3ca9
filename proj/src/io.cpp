#include "attic/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "attic/errors.hpp"

namespace attic::io {

std::string format_double(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ContractError("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ContractError("cannot write " + path);
    out << content;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::pair<std::string, double> parse_assignment(const std::string& arg) {
    size_t eq = arg.find('=');
    if (eq == std::string::npos) throw ContractError("expected name=value, got " + arg);
    double value = 0.0;
    std::string num = arg.substr(eq + 1);
    auto res = std::from_chars(num.data(), num.data() + num.size(), value);
    if (res.ec != std::errc{} || res.ptr != num.data() + num.size())
        throw ContractError("bad numeric value in " + arg);
    return {arg.substr(0, eq), value};
}

}  // namespace attic::io
