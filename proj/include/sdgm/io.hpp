#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sdgm {

/// Library version, `git describe` of the source tree at configure time.
[[nodiscard]] std::string_view version();

/// 64-bit FNV-1a.
[[nodiscard]] std::uint64_t fnv1a(std::string_view bytes);

/// "sdgm <version> config=<16 hex digits>", the first line of every output file.
[[nodiscard]] std::string provenance(std::uint64_t config_hash);

/// Matrix files:
///
///   # free-form comment lines
///   matrix <rows> <cols>
///   <row-major values, one row per line, %.17g>
///
/// The binary variant replaces the keyword with `matrix_binary` and follows
/// the header line with rows*cols little-endian IEEE doubles, row-major.
/// `comments` are written without the leading "# ".
void write_matrix(std::ostream& out, const Eigen::MatrixXd& m, const std::vector<std::string>& comments = {});
void write_matrix_binary(std::ostream& out, const Eigen::MatrixXd& m, const std::vector<std::string>& comments = {});

/// Reads either variant. Throws ParseError with the line number.
[[nodiscard]] Eigen::MatrixXd read_matrix(std::istream& in);

/// File wrappers; IoError when the file cannot be opened or written.
void save_matrix(const std::string& path, const Eigen::MatrixXd& m, const std::vector<std::string>& comments = {},
                 bool binary = false);
[[nodiscard]] Eigen::MatrixXd load_matrix(const std::string& path);

} // namespace sdgm
