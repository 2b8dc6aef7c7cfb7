#include "plantedrank/matrix.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace plantedrank {

bool in_unit_range(const Matrix& m) {
    for (double v : m.data)
        if (!(v >= 0.0 && v <= 1.0)) return false;
    return true;
}

double frobenius_sq(const Matrix& m) {
    double s = 0.0;
    for (double v : m.data) s += v * v;
    return s;
}

Matrix to_matrix(const ObservationMatrix& y) {
    Matrix m(y.rows, y.cols);
    for (std::size_t i = 0; i < y.data.size(); ++i) m.data[i] = static_cast<double>(y.data[i]);
    return m;
}

std::string format_double(double v) {
    char buf[64];
    // %.17g round-trips any double; prefer the shortest form that does.
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::stod(buf) == v) return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::pair<int, int> read_header(std::istream& in, const std::string& path) {
    int n = 0, d = 0;
    if (!(in >> n >> d) || n < 1 || d < 1)
        throw Error("bad matrix header in " + path);
    return {n, d};
}

}  // namespace

void write_signal_file(const Matrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << m.rows << " " << m.cols << "\n";
    for (int i = 0; i < m.rows; ++i) {
        for (int k = 0; k < m.cols; ++k) {
            if (k) out << " ";
            out << format_double(m.at(i, k));
        }
        out << "\n";
    }
    if (!out) throw Error("write failed: " + path);
}

Matrix read_signal_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open: " + path);
    auto [n, d] = read_header(in, path);
    Matrix m(n, d);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < d; ++k)
            if (!(in >> m.at(i, k))) throw Error("truncated matrix file: " + path);
    return m;
}

void write_observation_file(const ObservationMatrix& y, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << y.rows << " " << y.cols << "\n";
    for (int i = 0; i < y.rows; ++i) {
        for (int k = 0; k < y.cols; ++k) {
            if (k) out << " ";
            out << static_cast<int>(y.at(i, k));
        }
        out << "\n";
    }
    if (!out) throw Error("write failed: " + path);
}

ObservationMatrix read_observation_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open: " + path);
    auto [n, d] = read_header(in, path);
    ObservationMatrix y(n, d);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < d; ++k) {
            int v = 0;
            if (!(in >> v)) throw Error("truncated matrix file: " + path);
            if (v != 1 && v != -1) throw Error("observation entries must be -1 or 1: " + path);
            y.at(i, k) = static_cast<std::int8_t>(v);
        }
    return y;
}

}  // namespace plantedrank
