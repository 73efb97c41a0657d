#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "msq/syntax.hpp"

namespace msq::test {

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string data_path(const std::string& name) { return std::string(MSQ_TEST_DATA) + "/" + name; }
inline std::string data(const std::string& name) { return slurp(data_path(name)); }

inline Value iri(const std::string& s) { return Value::iri(s); }

inline sparql::Mapping mapping(std::initializer_list<std::pair<const std::string, std::string>> kv) {
    sparql::Mapping m;
    for (const auto& [k, v] : kv) m[k] = Value::iri(v);
    return m;
}

}  // namespace msq::test
