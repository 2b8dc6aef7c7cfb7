#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace plantedrank {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameter/contract violations (bad shapes, out-of-range tuning values).
struct InvalidArgument : Error {
    using Error::Error;
};

// Dense row-major real matrix. Signal matrices additionally keep entries in
// [0,1]; that is validated at the API boundaries that require it, not here.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int n, int d, double fill = 0.0)
        : rows(n), cols(d), data(static_cast<std::size_t>(n) * d, fill) {
        if (n < 0 || d < 0) throw InvalidArgument("Matrix: negative dimension");
    }

    double& at(int i, int k) { return data[static_cast<std::size_t>(i) * cols + k]; }
    double at(int i, int k) const { return data[static_cast<std::size_t>(i) * cols + k]; }
    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

// Observations live in {-1,+1}; kept as int8 so statistics stay in exact
// integer arithmetic until they meet a threshold.
struct ObservationMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<std::int8_t> data;

    ObservationMatrix() = default;
    ObservationMatrix(int n, int d, std::int8_t fill = -1)
        : rows(n), cols(d), data(static_cast<std::size_t>(n) * d, fill) {
        if (n < 0 || d < 0) throw InvalidArgument("ObservationMatrix: negative dimension");
    }

    std::int8_t& at(int i, int k) { return data[static_cast<std::size_t>(i) * cols + k]; }
    std::int8_t at(int i, int k) const { return data[static_cast<std::size_t>(i) * cols + k]; }
};

bool in_unit_range(const Matrix& m);              // all entries within [0,1]
double frobenius_sq(const Matrix& m);
Matrix to_matrix(const ObservationMatrix& y);     // widen +-1 entries to double

// Plain-text matrix files: first line "n d", then n rows of d values.
// Signal files carry decimals, observation files carry -1/1 integers.
void write_signal_file(const Matrix& m, const std::string& path);
Matrix read_signal_file(const std::string& path);
void write_observation_file(const ObservationMatrix& y, const std::string& path);
ObservationMatrix read_observation_file(const std::string& path);

std::string format_double(double v);  // shortest round-trip decimal form

}  // namespace plantedrank
