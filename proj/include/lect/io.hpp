#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "lect/complex.hpp"

namespace lect {

using Json = nlohmann::ordered_json;

/// Malformed input, tagged with the 1-based line it was found on.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line)
    {
    }
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Text formats. Lines starting with '#' are comments; a "# config {...}"
// comment carries the run configuration that produced the file.
//
//   complex:  "ambient_dim n_vertices", one coordinate line per vertex, then
//             one line per simplex "k i_0 ... i_k" (k >= 1; k = 0 lines are
//             accepted and ignored).
//   graph:    "n_nodes n_edges feat_dim", one line per node
//             "id f_1 ... f_d [label]", then one line per edge "u v".

GeometricComplex read_complex(std::istream& in);
GeometricComplex read_complex(const std::filesystem::path& path);
void write_complex(std::ostream& out, const GeometricComplex& complex, const Json* config = nullptr);
void write_complex(const std::filesystem::path& path, const GeometricComplex& complex, const Json* config = nullptr);

FeaturedGraph read_graph(std::istream& in);
FeaturedGraph read_graph(const std::filesystem::path& path);
void write_graph(std::ostream& out, const FeaturedGraph& graph, const Json* config = nullptr);
void write_graph(const std::filesystem::path& path, const FeaturedGraph& graph, const Json* config = nullptr);

/// Binary matrix container: the line "LECTBIN1", one line of JSON metadata
/// (which records "rows" and "cols"), then rows * cols little-endian float64
/// values in row-major order.
void write_matrix_file(const std::filesystem::path& path, Json metadata, const Eigen::MatrixXd& values);

struct MatrixFile {
    Json metadata;
    Eigen::MatrixXd values;
};
MatrixFile read_matrix_file(const std::filesystem::path& path);

/// CSV with a leading node_id column and an optional y column.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& column_names,
               const Eigen::MatrixXd& values, const std::vector<int>* labels = nullptr,
               const std::string& comment = {});

void write_json(const std::filesystem::path& path, const Json& document);
Json read_json(const std::filesystem::path& path);

/// Configuration embedded in any file written by this library.
Json read_embedded_config(const std::filesystem::path& path);

/// Shortest round-trip decimal form.
std::string format_double(double value);

}  // namespace lect
