// io.hpp
// Locale-independent CSV formatting and JSON encodings of library types.

#pragma once

#include "qrl/circuit.hpp"

#include "json.hpp"

#include <charconv>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qrl {

inline constexpr std::string_view toolkit_version = "0.1.0";

// Shortest round-trip-safe text is not bit-stable across libraries, so a
// fixed 17 significant digits is used instead.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

class CsvWriter {
public:
    // Comment lines start with '#'.
    void comment(std::string_view text) {
        out_ += "# ";
        out_ += text;
        out_ += '\n';
    }

    void header(std::initializer_list<std::string_view> cols) {
        bool first = true;
        for (auto c : cols) {
            if (!first) out_ += ',';
            out_ += c;
            first = false;
        }
        out_ += '\n';
    }

    template <typename... Ts>
    void row(const Ts&... values) {
        bool first = true;
        ((append(values, first)), ...);
        out_ += '\n';
    }

    const std::string& str() const { return out_; }

private:
    void append(double v, bool& first) { sep(first); out_ += format_double(v); }
    void append(std::size_t v, bool& first) { sep(first); out_ += std::to_string(v); }
    void append(int v, bool& first) { sep(first); out_ += std::to_string(v); }
    void append(std::string_view v, bool& first) { sep(first); out_ += v; }
    void sep(bool& first) {
        if (!first) out_ += ',';
        first = false;
    }

    std::string out_;
};

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("file not found: " + path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline nlohmann::json state_to_json(const StateVector& s) {
    std::vector<double> re, im;
    for (const auto& a : s.amplitudes()) {
        re.push_back(a.real());
        im.push_back(a.imag());
    }
    return {{"re", re}, {"im", im}};
}

inline StateVector state_from_json(const nlohmann::json& j, bool normalize = false) {
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.contains("im") ? j.at("im").get<std::vector<double>>() : std::vector<double>(re.size(), 0.0);
    if (re.size() != im.size()) throw std::invalid_argument("state: 're' and 'im' lengths differ");
    std::vector<complex> amps(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) amps[i] = {re[i], im[i]};
    return StateVector::from_amplitudes(std::move(amps), normalize);
}

inline nlohmann::json params_to_json(const CircuitParameters& p) {
    return {{"qubits", p.n_qubits()},
            {"layers", p.n_layers()},
            {"angles", std::vector<double>(p.flat().begin(), p.flat().end())}};
}

inline CircuitParameters params_from_json(const nlohmann::json& j) {
    return CircuitParameters(j.at("qubits").get<std::size_t>(), j.at("layers").get<std::size_t>(),
                             j.at("angles").get<std::vector<double>>());
}

} // namespace qrl
