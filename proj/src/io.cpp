#include "lect/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace lect {

namespace {

struct LineReader {
    std::istream& in;
    std::size_t number = 0;
    std::string text;

    // Next non-blank, non-comment line split into tokens; false at EOF.
    bool next(std::vector<std::string>& tokens)
    {
        while (std::getline(in, text)) {
            ++number;
            if (!text.empty() && text.back() == '\r') text.pop_back();
            const auto first = text.find_first_not_of(" \t");
            if (first == std::string::npos || text[first] == '#') continue;
            tokens.clear();
            std::istringstream words(text);
            for (std::string w; words >> w;) tokens.push_back(std::move(w));
            return true;
        }
        return false;
    }
};

template <typename T>
T parse_number(const std::string& token, std::size_t line, const char* what)
{
    T value{};
    const char* begin = token.data();
    const char* end = begin + token.size();
    if (!token.empty() && token[0] == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw ParseError(line, std::string("expected ") + what + ", got '" + token + "'");
    }
    return value;
}

std::ifstream open_input(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in)
{
    std::ifstream in(path, mode);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, mode | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void write_config_comment(std::ostream& out, const Json* config)
{
    if (config) out << "# config " << config->dump() << '\n';
}

}  // namespace

std::string format_double(double value)
{
    std::array<char, 64> buffer{};
    const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    if (ec != std::errc()) throw std::runtime_error("cannot format number");
    return std::string(buffer.data(), ptr);
}

GeometricComplex read_complex(std::istream& in)
{
    LineReader reader{in, 0, {}};
    std::vector<std::string> tok;
    if (!reader.next(tok)) throw ParseError(reader.number, "missing header 'ambient_dim n_vertices'");
    if (tok.size() != 2) throw ParseError(reader.number, "header must be 'ambient_dim n_vertices'");
    const auto dim = parse_number<long>(tok[0], reader.number, "ambient dimension");
    const auto count = parse_number<long>(tok[1], reader.number, "vertex count");
    if (dim < 1 || count < 0) throw ParseError(reader.number, "ambient_dim must be >= 1 and n_vertices >= 0");

    Points pts(count, dim);
    for (long i = 0; i < count; ++i) {
        if (!reader.next(tok)) throw ParseError(reader.number, "expected " + std::to_string(count) + " vertex lines");
        if (static_cast<long>(tok.size()) != dim) {
            throw ParseError(reader.number, "vertex line needs " + std::to_string(dim) + " coordinates");
        }
        for (long c = 0; c < dim; ++c) pts(i, c) = parse_number<double>(tok[static_cast<std::size_t>(c)], reader.number, "coordinate");
    }

    std::vector<std::vector<Simplex>> lists;
    while (reader.next(tok)) {
        const auto k = parse_number<long>(tok[0], reader.number, "simplex dimension");
        if (k < 0 || static_cast<long>(tok.size()) != k + 2) {
            throw ParseError(reader.number, "simplex line must be 'k i_0 ... i_k'");
        }
        Simplex s;
        for (long i = 0; i <= k; ++i) {
            const auto v = parse_number<long>(tok[static_cast<std::size_t>(i + 1)], reader.number, "vertex index");
            if (v < 0 || v >= count) throw ParseError(reader.number, "vertex index " + std::to_string(v) + " out of range");
            if (i > 0 && static_cast<Index>(v) <= s.back()) {
                throw ParseError(reader.number, "simplex indices must be strictly increasing");
            }
            s.push_back(static_cast<Index>(v));
        }
        if (k == 0) continue;
        if (lists.size() < static_cast<std::size_t>(k)) lists.resize(static_cast<std::size_t>(k));
        lists[static_cast<std::size_t>(k - 1)].push_back(std::move(s));
    }
    try {
        return GeometricComplex(std::move(pts), std::move(lists));
    } catch (const std::invalid_argument& e) {
        throw ParseError(reader.number, e.what());
    }
}

GeometricComplex read_complex(const std::filesystem::path& path)
{
    auto in = open_input(path);
    return read_complex(in);
}

void write_complex(std::ostream& out, const GeometricComplex& complex, const Json* config)
{
    write_config_comment(out, config);
    out << complex.ambient_dim() << ' ' << complex.num_vertices() << '\n';
    const auto& v = complex.vertices();
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        for (Eigen::Index c = 0; c < v.cols(); ++c) out << (c ? " " : "") << format_double(v(i, c));
        out << '\n';
    }
    for (int k = 1; k <= complex.dimension(); ++k) {
        for (const Simplex& s : complex.simplices(k)) {
            out << k;
            for (Index u : s) out << ' ' << u;
            out << '\n';
        }
    }
}

void write_complex(const std::filesystem::path& path, const GeometricComplex& complex, const Json* config)
{
    auto out = open_output(path);
    write_complex(out, complex, config);
}

FeaturedGraph read_graph(std::istream& in)
{
    LineReader reader{in, 0, {}};
    std::vector<std::string> tok;
    if (!reader.next(tok)) throw ParseError(reader.number, "missing header 'n_nodes n_edges feat_dim'");
    if (tok.size() != 3) throw ParseError(reader.number, "header must be 'n_nodes n_edges feat_dim'");
    const auto nodes = parse_number<long>(tok[0], reader.number, "node count");
    const auto n_edges = parse_number<long>(tok[1], reader.number, "edge count");
    const auto dim = parse_number<long>(tok[2], reader.number, "feature dimension");
    if (nodes < 0 || n_edges < 0 || dim < 1) throw ParseError(reader.number, "invalid graph header");

    Points features(nodes, dim);
    std::vector<int> labels(static_cast<std::size_t>(nodes), 0);
    std::vector<char> seen(static_cast<std::size_t>(nodes), 0);
    int with_label = -1;
    for (long i = 0; i < nodes; ++i) {
        if (!reader.next(tok)) throw ParseError(reader.number, "expected " + std::to_string(nodes) + " node lines");
        const bool labelled = static_cast<long>(tok.size()) == dim + 2;
        if (!labelled && static_cast<long>(tok.size()) != dim + 1) {
            throw ParseError(reader.number, "node line must be 'id f_1 ... f_" + std::to_string(dim) + " [label]'");
        }
        if (with_label < 0) with_label = labelled;
        if (with_label != static_cast<int>(labelled)) throw ParseError(reader.number, "labels must be given for all nodes or none");
        const auto id = parse_number<long>(tok[0], reader.number, "node id");
        if (id < 0 || id >= nodes) throw ParseError(reader.number, "node id " + std::to_string(id) + " out of range");
        if (seen[static_cast<std::size_t>(id)]++) throw ParseError(reader.number, "duplicate node id " + std::to_string(id));
        for (long c = 0; c < dim; ++c) {
            features(id, c) = parse_number<double>(tok[static_cast<std::size_t>(c + 1)], reader.number, "feature value");
        }
        if (labelled) labels[static_cast<std::size_t>(id)] = parse_number<int>(tok.back(), reader.number, "label");
    }
    std::vector<std::pair<Index, Index>> edges;
    for (long e = 0; e < n_edges; ++e) {
        if (!reader.next(tok)) throw ParseError(reader.number, "expected " + std::to_string(n_edges) + " edge lines");
        if (tok.size() != 2) throw ParseError(reader.number, "edge line must be 'u v'");
        const auto u = parse_number<long>(tok[0], reader.number, "node id");
        const auto v = parse_number<long>(tok[1], reader.number, "node id");
        if (u < 0 || v < 0 || u >= nodes || v >= nodes) throw ParseError(reader.number, "edge endpoint out of range");
        if (u == v) throw ParseError(reader.number, "self-loop at node " + std::to_string(u));
        edges.emplace_back(static_cast<Index>(u), static_cast<Index>(v));
    }
    if (reader.next(tok)) throw ParseError(reader.number, "unexpected trailing content");
    std::optional<std::vector<int>> maybe_labels;
    if (with_label == 1) maybe_labels = std::move(labels);
    return FeaturedGraph(std::move(features), std::move(edges), std::move(maybe_labels));
}

FeaturedGraph read_graph(const std::filesystem::path& path)
{
    auto in = open_input(path);
    return read_graph(in);
}

void write_graph(std::ostream& out, const FeaturedGraph& graph, const Json* config)
{
    write_config_comment(out, config);
    out << graph.num_nodes() << ' ' << graph.edges.size() << ' ' << graph.feature_dim() << '\n';
    for (std::size_t i = 0; i < graph.num_nodes(); ++i) {
        out << i;
        for (int c = 0; c < graph.feature_dim(); ++c) out << ' ' << format_double(graph.features(static_cast<Eigen::Index>(i), c));
        if (graph.labels) out << ' ' << (*graph.labels)[i];
        out << '\n';
    }
    for (auto [u, v] : graph.edges) out << u << ' ' << v << '\n';
}

void write_graph(const std::filesystem::path& path, const FeaturedGraph& graph, const Json* config)
{
    auto out = open_output(path);
    write_graph(out, graph, config);
}

namespace {

constexpr const char* kMagic = "LECTBIN1";

std::uint64_t to_little_endian(std::uint64_t bits)
{
    if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(bits);
    return bits;
}

}  // namespace

void write_matrix_file(const std::filesystem::path& path, Json metadata, const Eigen::MatrixXd& values)
{
    metadata["rows"] = values.rows();
    metadata["cols"] = values.cols();
    auto out = open_output(path, std::ios::binary);
    out << kMagic << '\n' << metadata.dump() << '\n';
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(values(i, j)));
            out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
        }
    }
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

MatrixFile read_matrix_file(const std::filesystem::path& path)
{
    auto in = open_input(path, std::ios::binary);
    std::string magic, header;
    std::getline(in, magic);
    if (magic != kMagic) throw ParseError(1, "not a binary matrix file (bad magic)");
    std::getline(in, header);
    MatrixFile file;
    try {
        file.metadata = Json::parse(header);
    } catch (const Json::parse_error& e) {
        throw ParseError(2, std::string("bad metadata header: ") + e.what());
    }
    const auto rows = file.metadata.at("rows").get<Eigen::Index>();
    const auto cols = file.metadata.at("cols").get<Eigen::Index>();
    file.values.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            std::uint64_t bits = 0;
            if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits)) throw std::runtime_error("truncated matrix block");
            file.values(i, j) = std::bit_cast<double>(to_little_endian(bits));
        }
    }
    return file;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& column_names,
               const Eigen::MatrixXd& values, const std::vector<int>* labels, const std::string& comment)
{
    if (static_cast<Eigen::Index>(column_names.size()) != values.cols()) {
        throw std::invalid_argument("write_csv: column name count mismatch");
    }
    auto out = open_output(path);
    if (!comment.empty()) out << "# " << comment << '\n';
    out << "node_id";
    if (labels) out << ",y";
    for (const auto& name : column_names) out << ',' << name;
    out << '\n';
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        out << i;
        if (labels) out << ',' << (*labels)[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < values.cols(); ++j) out << ',' << format_double(values(i, j));
        out << '\n';
    }
}

void write_json(const std::filesystem::path& path, const Json& document)
{
    auto out = open_output(path);
    out << document.dump(2) << '\n';
}

Json read_json(const std::filesystem::path& path)
{
    auto in = open_input(path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ParseError(0, std::string("invalid JSON in ") + path.string() + ": " + e.what());
    }
}

Json read_embedded_config(const std::filesystem::path& path)
{
    auto in = open_input(path, std::ios::binary);
    std::string line;
    std::getline(in, line);
    if (line == kMagic) {
        std::getline(in, line);
        return Json::parse(line).at("config");
    }
    if (!line.empty() && line[0] == '{') return read_json(path).at("config");
    do {
        constexpr std::string_view prefix = "# config ";
        if (line.rfind(prefix, 0) == 0) return Json::parse(line.substr(prefix.size()));
    } while (std::getline(in, line));
    throw std::runtime_error(path.string() + " carries no embedded configuration");
}

}  // namespace lect
