#include "dendro/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "dendro/errors.hpp"

namespace dendro::io {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& field, std::size_t line) {
    const std::string text = trim(field);
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw InvalidInput{"line " + std::to_string(line) + ": cannot parse '" + text + "'"};
    }
    return value;
}

nlohmann::json leaf_set_json(LeafSet s) {
    auto j = nlohmann::json::array();
    for (const std::size_t leaf : leaves_of(s)) {
        j.push_back(leaf + 1);
    }
    return j;
}

LeafSet leaf_set_from_json(const nlohmann::json& j, std::size_t& max_label) {
    if (!j.is_array() || j.empty()) {
        throw InvalidInput{"leaf set must be a nonempty array of labels"};
    }
    LeafSet s = 0;
    for (const auto& v : j) {
        if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > 64) {
            throw InvalidInput{"leaf labels must be integers in [1, 64]"};
        }
        const auto label = v.get<std::size_t>();
        if (s & leaf_bit(label - 1)) {
            throw InvalidInput{"leaf set lists a label twice"};
        }
        s |= leaf_bit(label - 1);
        max_label = std::max(max_label, label);
    }
    return s;
}

}  // namespace

Dissimilarity read_dissimilarity_csv(std::istream& in) {
    std::string raw;
    std::size_t line = 0;
    std::size_t n = 0;
    std::vector<double> values;
    std::vector<char> seen;
    while (std::getline(in, raw)) {
        ++line;
        const std::string text = trim(raw);
        if (text.empty()) {
            continue;
        }
        if (n == 0) {
            n = parse_number<std::size_t>(text, line);
            if (n < 2) {
                throw InvalidInput{"line " + std::to_string(line) + ": n must be at least 2"};
            }
            values.assign(pair_count(n), 0.0);
            seen.assign(pair_count(n), 0);
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream row{text};
        for (std::string f; std::getline(row, f, ',');) {
            fields.push_back(f);
        }
        if (fields.size() != 3) {
            throw InvalidInput{"line " + std::to_string(line) + ": expected i,j,value"};
        }
        const auto i = parse_number<std::size_t>(fields[0], line);
        const auto j = parse_number<std::size_t>(fields[1], line);
        const auto v = parse_number<double>(fields[2], line);
        if (i < 1 || j < 1 || i > n || j > n || i >= j) {
            throw InvalidInput{"line " + std::to_string(line) + ": need 1 <= i < j <= n"};
        }
        const std::size_t k = pair_index(n, i - 1, j - 1);
        if (seen[k]) {
            throw InvalidInput{"line " + std::to_string(line) + ": duplicate pair"};
        }
        seen[k] = 1;
        values[k] = v;
    }
    if (n == 0) {
        throw InvalidInput{"empty dissimilarity file"};
    }
    for (std::size_t k = 0; k < seen.size(); ++k) {
        if (!seen[k]) {
            throw InvalidInput{"missing pairs: expected " + std::to_string(pair_count(n)) + " rows"};
        }
    }
    return Dissimilarity{n, std::move(values)};
}

Dissimilarity read_dissimilarity_csv(const std::filesystem::path& path) {
    std::ifstream in{path};
    if (!in) {
        throw InvalidInput{"cannot open " + path.string()};
    }
    return read_dissimilarity_csv(in);
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

void write_dissimilarity_csv(std::ostream& out, const Dissimilarity& d) {
    const std::size_t n = d.size();
    out << n << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            out << i + 1 << ',' << j + 1 << ',' << format_double(d(i, j)) << '\n';
        }
    }
}

nlohmann::json to_json(const Structure& s) {
    auto merges = nlohmann::json::array();
    for (const auto& event : s.merges()) {
        auto parts = nlohmann::json::array();
        for (const LeafSet p : event.parts) {
            parts.push_back(leaf_set_json(p));
        }
        merges.push_back(std::move(parts));
    }
    return nlohmann::json{{"merges", std::move(merges)}};
}

nlohmann::json to_json(const Dendrogram& d) {
    auto j = to_json(d.structure);
    j["heights"] = d.heights;
    return j;
}

nlohmann::json to_json(const SpanningTree& t) {
    auto j = nlohmann::json::array();
    for (const auto& e : t.edges()) {
        j.push_back({e.a + 1, e.b + 1});
    }
    return j;
}

nlohmann::json to_json(const EstimateReport& report) {
    auto ranked = nlohmann::json::array();
    for (const auto& h : report.ranked) {
        ranked.push_back({{"structure", to_json(h.structure)},
                          {"log_likelihood", h.log_likelihood},
                          {"mh_count", h.mh_count}});
    }
    return nlohmann::json{{"ranked", std::move(ranked)},
                          {"chosen", to_json(report.chosen)},
                          {"baseline", to_json(report.baseline)},
                          {"baseline_degenerate", report.baseline_degenerate},
                          {"scale", report.scale}};
}

Structure structure_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("merges") || !j["merges"].is_array()) {
        throw InvalidInput{"structure JSON needs a \"merges\" array"};
    }
    std::size_t max_label = 0;
    std::vector<MergeEvent> merges;
    for (const auto& event : j["merges"]) {
        if (!event.is_array()) {
            throw InvalidInput{"each merge must be an array of leaf sets"};
        }
        MergeEvent e;
        for (const auto& part : event) {
            e.parts.push_back(leaf_set_from_json(part, max_label));
        }
        merges.push_back(std::move(e));
    }
    return Structure{max_label, std::move(merges)};
}

Dendrogram dendrogram_from_json(const nlohmann::json& j) {
    Structure s = structure_from_json(j);
    if (!j.contains("heights") || !j["heights"].is_array()) {
        throw InvalidInput{"dendrogram JSON needs a \"heights\" array"};
    }
    std::vector<double> heights;
    for (const auto& h : j["heights"]) {
        if (!h.is_number()) {
            throw InvalidInput{"heights must be numbers"};
        }
        heights.push_back(h.get<double>());
    }
    if (heights.size() != s.merges().size()) {
        throw InvalidInput{"one height per merge expected"};
    }
    return Dendrogram{std::move(s), std::move(heights)};
}

SpanningTree spanning_tree_from_json(const nlohmann::json& j, std::size_t n) {
    if (!j.is_array()) {
        throw InvalidInput{"spanning tree JSON must be an array of edges"};
    }
    std::vector<Edge> edges;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
            throw InvalidInput{"each edge must be a pair of labels"};
        }
        const auto a = e[0].get<long long>();
        const auto b = e[1].get<long long>();
        if (a < 1 || b < 1) {
            throw InvalidInput{"edge labels are 1-based"};
        }
        edges.push_back(make_edge(static_cast<std::size_t>(a - 1), static_cast<std::size_t>(b - 1)));
    }
    return SpanningTree{n, std::move(edges)};
}

}  // namespace dendro::io
