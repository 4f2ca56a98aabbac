#include "sdgm/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sdgm/errors.hpp"

#ifndef SDGM_VERSION
#define SDGM_VERSION "unknown"
#endif

namespace sdgm {

std::string_view version()
{
    return SDGM_VERSION;
}

std::uint64_t fnv1a(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string provenance(std::uint64_t config_hash)
{
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(config_hash));
    return "sdgm " + std::string(version()) + " config=" + hex;
}

namespace {

void write_comments(std::ostream& out, const std::vector<std::string>& comments)
{
    for (const auto& c : comments) {
        out << "# " << c << '\n';
    }
}

std::uint64_t to_little_endian(std::uint64_t bits)
{
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t r = 0;
        for (int k = 0; k < 8; ++k) {
            r = (r << 8) | ((bits >> (8 * k)) & 0xff);
        }
        return r;
    }
    return bits;
}

} // namespace

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m, const std::vector<std::string>& comments)
{
    write_comments(out, comments);
    out << "matrix " << m.rows() << ' ' << m.cols() << '\n';
    char buf[32];
    std::string line;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        line.clear();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            if (j) {
                line += ' ';
            }
            line += buf;
        }
        out << line << '\n';
    }
}

void write_matrix_binary(std::ostream& out, const Eigen::MatrixXd& m, const std::vector<std::string>& comments)
{
    write_comments(out, comments);
    out << "matrix_binary " << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(m(i, j)));
            out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
        }
    }
}

Eigen::MatrixXd read_matrix(std::istream& in)
{
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        std::istringstream head(line);
        std::string keyword;
        long long rows = -1;
        long long cols = -1;
        head >> keyword >> rows >> cols;
        if ((keyword != "matrix" && keyword != "matrix_binary") || head.fail() || rows < 0 || cols < 0) {
            throw ParseError(lineno, "expected 'matrix <rows> <cols>', got '" + line + "'");
        }
        Eigen::MatrixXd m(rows, cols);
        if (keyword == "matrix_binary") {
            for (long long i = 0; i < rows; ++i) {
                for (long long j = 0; j < cols; ++j) {
                    std::uint64_t bits = 0;
                    if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits)) {
                        throw ParseError(lineno, "binary payload truncated");
                    }
                    m(i, j) = std::bit_cast<double>(to_little_endian(bits));
                }
            }
            return m;
        }
        for (long long i = 0; i < rows; ++i) {
            if (!std::getline(in, line)) {
                throw ParseError(lineno + 1, "expected " + std::to_string(rows) + " rows, file ended");
            }
            ++lineno;
            std::istringstream row(line);
            for (long long j = 0; j < cols; ++j) {
                if (!(row >> m(i, j))) {
                    throw ParseError(lineno, "expected " + std::to_string(cols) + " values");
                }
            }
            std::string extra;
            if (row >> extra) {
                throw ParseError(lineno, "trailing token '" + extra + "'");
            }
        }
        return m;
    }
    throw ParseError(lineno, "no matrix header found");
}

void save_matrix(const std::string& path, const Eigen::MatrixXd& m, const std::vector<std::string>& comments,
                 bool binary)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    if (binary) {
        write_matrix_binary(out, m, comments);
    } else {
        write_matrix(out, m, comments);
    }
    if (!out) {
        throw IoError("write to '" + path + "' failed");
    }
}

Eigen::MatrixXd load_matrix(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    return read_matrix(in);
}

} // namespace sdgm
