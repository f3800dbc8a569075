#ifndef INTERCORE_TEST_UTIL_HPP
#define INTERCORE_TEST_UTIL_HPP

#include <fstream>
#include <sstream>
#include <string>

namespace testutil {

inline std::string fixture_path(const std::string& rel) {
    return std::string(INTERCORE_FIXTURES_DIR) + "/" + rel;
}

inline std::string slurp(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

inline std::string fixture(const std::string& rel) { return slurp(fixture_path(rel)); }

}  // namespace testutil

#endif
